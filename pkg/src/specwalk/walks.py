"""Per-entity walk corpus extraction with biased edge choice and pruning.

Bias modes: uniform over outgoing edges; frequency (global predicate
frequency); pagerank (next-node score, literals unscored); specificity (walk
follows a relationship template drawn from above-threshold table entries with
probability proportional to score). Pruning predicates follow the four
schemes NRSE / UE / NRST / UET.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .graph import Graph
from .specificity import SpecificityTable

BIASES = ("uniform", "frequency", "pagerank", "specificity")
PRUNING_SCHEMES = ("none", "NRSE", "UE", "NRST", "UET")


@dataclass(frozen=True)
class Walk:
    """Alternating node/predicate token sequence v0,e1,v1,...,ed,vd."""

    tokens: tuple[int, ...]

    def __post_init__(self):
        if len(self.tokens) < 3 or len(self.tokens) % 2 == 0:
            raise ValueError("walk must be v0,e1,v1,... with at least one edge")

    @property
    def nodes(self) -> tuple[int, ...]:
        return self.tokens[0::2]

    @property
    def predicates(self) -> tuple[int, ...]:
        return self.tokens[1::2]

    @property
    def depth(self) -> int:
        return len(self.tokens) // 2


@dataclass
class WalkStrategy:
    bias: str = "uniform"
    pruning: str = "none"
    depth: int = 2
    walks_per_entity: int = 500
    specificity_table: SpecificityTable | None = None
    threshold: float = 0.5
    pagerank_scores: dict[int, float] | None = None

    def __post_init__(self):
        if self.bias not in BIASES:
            raise ValueError(f"unknown bias: {self.bias!r}")
        if self.pruning not in PRUNING_SCHEMES:
            raise ValueError(f"unknown pruning scheme: {self.pruning!r}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.bias == "specificity" and self.specificity_table is None:
            raise ValueError("specificity bias requires a specificity table")
        if self.bias == "pagerank" and self.pagerank_scores is None:
            raise ValueError("pagerank bias requires node scores")

    def describe(self) -> str:
        return (f"bias={self.bias} pruning={self.pruning} depth={self.depth} "
                f"walks={self.walks_per_entity}")


@dataclass
class EntityStats:
    entity: int
    attempts: int
    walks: int
    distinct: int
    millis: float


@dataclass
class WalkCorpus:
    walks: list[Walk] = field(default_factory=list)
    stats: list[EntityStats] = field(default_factory=list)


def prune_check(walk: Walk, scheme: str, g: Graph) -> bool:
    """True when the walk passes the pruning predicate.

    NRSE: the root must not reappear. UE: all nodes unique. NRST: no
    intermediate node (strictly before the terminal) shares a type with the
    root; the terminal may. UET: no two nodes anywhere share a type.
    """
    if scheme == "none":
        return True
    nodes = walk.nodes
    if scheme == "NRSE":
        return nodes[0] not in nodes[1:]
    if scheme == "UE":
        return len(set(nodes)) == len(nodes)
    if scheme == "NRST":
        root_types = g.types_of(nodes[0])
        if not root_types:
            return True
        return all(not (g.types_of(v) & root_types) for v in nodes[1:-1])
    if scheme == "UET":
        seen: set[int] = set()
        for v in nodes:
            ts = g.types_of(v)
            if ts & seen:
                return False
            seen |= ts
        return True
    raise ValueError(f"unknown pruning scheme: {scheme!r}")


def _walk_uniform(g, v0, depth, rng, weight_fn):
    tokens = [v0]
    v = v0
    for _ in range(depth):
        edges = g.out_adj[v]
        if not edges:
            break
        if weight_fn is None:
            p, o = edges[rng.randrange(len(edges))]
        else:
            weights = [weight_fn(p, o) for p, o in edges]
            total = sum(weights)
            if total <= 0:
                break
            p, o = rng.choices(edges, weights=weights)[0]
        tokens.extend((p, o))
        v = o
    return tokens if len(tokens) >= 3 else None


def _walk_template(g, v0, template, rng):
    tokens = [v0]
    v = v0
    for pred in template:
        matches = [o for p, o in g.out_adj[v] if p == pred]
        if not matches:
            return None  # incomplete template: discard
        o = matches[rng.randrange(len(matches))]
        tokens.extend((pred, o))
        v = o
    return tokens


def extract_walks(g: Graph, entity: int, strategy: WalkStrategy,
                  seed: int = 0) -> WalkCorpus:
    """Up to walks_per_entity accepted walks rooted at entity.

    The budget counts attempts: walks rejected by pruning (or incomplete
    specificity templates) consume budget without being retried.
    """
    g._check(entity)
    rng = random.Random(f"{seed}|{entity}")
    start = time.perf_counter()
    corpus = WalkCorpus()

    weight_fn = None
    templates: list[tuple[int, ...]] = []
    template_weights: list[float] = []
    if strategy.bias == "frequency":
        freq = g.predicate_frequency()
        weight_fn = lambda p, o: freq.get(p, 0)  # noqa: E731
    elif strategy.bias == "pagerank":
        scores = strategy.pagerank_scores
        weight_fn = lambda p, o: scores.get(o, 0.0)  # noqa: E731
    elif strategy.bias == "specificity":
        for e in strategy.specificity_table.above_threshold(
                strategy.depth, strategy.threshold):
            templates.append(e.relationship.predicates)
            template_weights.append(e.score)

    attempts = strategy.walks_per_entity
    for _ in range(attempts):
        if strategy.bias == "specificity":
            if not templates:
                break
            template = rng.choices(templates, weights=template_weights)[0]
            tokens = _walk_template(g, entity, template, rng)
        else:
            tokens = _walk_uniform(g, entity, strategy.depth, rng, weight_fn)
        if tokens is None:
            continue
        walk = Walk(tuple(tokens))
        if prune_check(walk, strategy.pruning, g):
            corpus.walks.append(walk)

    millis = (time.perf_counter() - start) * 1000.0
    corpus.stats.append(EntityStats(
        entity=entity, attempts=attempts, walks=len(corpus.walks),
        distinct=len({w.tokens for w in corpus.walks}), millis=millis))
    return corpus


def extract_corpus(g: Graph, entities, strategy: WalkStrategy,
                   seed: int = 0, workers: int = 1) -> WalkCorpus:
    """Extract walks for many entities; deterministic regardless of workers.

    Per-entity random streams are derived from (seed, entity), so results are
    identical whether entities run sequentially or concurrently; output is
    merged in the given entity order.
    """
    entities = list(entities)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda e: extract_walks(g, e, strategy, seed), entities))
    else:
        parts = [extract_walks(g, e, strategy, seed) for e in entities]
    merged = WalkCorpus()
    for part in parts:
        merged.walks.extend(part.walks)
        merged.stats.extend(part.stats)
    return merged


@dataclass
class CorpusStats:
    walks: int
    distinct: int
    mean_depth: float
    millis: float


def corpus_stats(corpus: WalkCorpus) -> CorpusStats:
    n = len(corpus.walks)
    distinct = len({w.tokens for w in corpus.walks})
    mean_depth = sum(w.depth for w in corpus.walks) / n if n else 0.0
    millis = sum(s.millis for s in corpus.stats)
    return CorpusStats(n, distinct, mean_depth, millis)


# -- corpus files --------------------------------------------------------

def write_corpus(g: Graph, corpus: WalkCorpus, out,
                 header: dict | None = None) -> None:
    """One walk per line, space-separated tokens; '#' header records the run."""
    if header:
        fields = " ".join(f"{k}={v}" for k, v in sorted(header.items()))
        out.write(f"# {fields}\n")
    for walk in corpus.walks:
        out.write(" ".join(g.render_token(t) for t in walk.tokens) + "\n")


def write_stats_csv(g: Graph, corpus: WalkCorpus, out) -> None:
    out.write("entity,attempts,walks,distinct,millis\n")
    for s in corpus.stats:
        out.write(f"{g.terms[s.entity]},{s.attempts},{s.walks},"
                  f"{s.distinct},{s.millis:.3f}\n")


def read_corpus_lines(stream):
    """Token lists from a corpus stream, skipping header/comment lines."""
    for line in stream:
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        yield line.split(" ")
