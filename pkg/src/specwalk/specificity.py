"""Specificity of semantic relationships to an entity type.

Two routes are provided: an exact exhaustive computation over incoming-path
counts (mode "eq2") and a bidirectional random-walk Monte-Carlo estimator
(mode "alg2", the default). The estimator samples destination nodes in
proportion to forward-path multiplicity and weights reverse paths by the
product of inverse in-degrees, whereas the exact form averages uniformly over
distinct reachable nodes and counts paths uniformly; the discrepancy is
surfaced in output metadata.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace

from .graph import Graph, GraphError


@dataclass(frozen=True, order=True)
class SemanticRelationship:
    """An ordered predicate sequence; a template for fixed-length paths."""

    predicates: tuple[int, ...]

    def __post_init__(self):
        if len(self.predicates) < 1:
            raise ValueError("relationship must contain at least one predicate")

    @property
    def depth(self) -> int:
        return len(self.predicates)

    def render(self, graph: Graph) -> str:
        return "|".join(graph.terms[p] for p in self.predicates)


@dataclass(frozen=True)
class SpecificityEntry:
    relationship: SemanticRelationship
    score: float
    support: int

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score outside [0,1]: {self.score}")


@dataclass
class EstimatorParams:
    seed_set_size: int = 300
    n_walks: int = 2000
    candidates_per_depth: int | None = None  # None -> 25 * depth
    max_depth: int = 1
    threshold: float = 0.5
    forward_retry_limit: int = 10
    seed: int = 0
    mode: str = "alg2"  # "alg2" (estimator) or "eq2" (exact)
    include_type_edges: bool = False

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be in [0,1]")
        if self.mode not in ("alg2", "eq2"):
            raise ValueError(f"unknown mode: {self.mode!r}")
        if self.n_walks <= self.seed_set_size:
            raise ValueError("n_walks must exceed seed_set_size")

    def candidates_at(self, depth: int) -> int:
        return self.candidates_per_depth or 25 * depth


@dataclass
class SpecificityTable:
    """Per-depth ranked relationship lists plus run metadata."""

    depths: dict[int, list[SpecificityEntry]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def entries_at(self, depth: int) -> list[SpecificityEntry]:
        return self.depths.get(depth, [])

    def above_threshold(self, depth: int, threshold: float) -> list[SpecificityEntry]:
        return [e for e in self.entries_at(depth) if e.score >= threshold]

    def to_tsv(self, graph: Graph, out) -> None:
        out.write("depth\trelationship\tscore\tsupport\n")
        for depth in sorted(self.depths):
            for e in self.depths[depth]:
                out.write(f"{depth}\t{e.relationship.render(graph)}\t"
                          f"{e.score:.6f}\t{e.support}\n")

    def metadata_json(self) -> str:
        return json.dumps(self.metadata, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_tsv(cls, graph: Graph, lines, metadata: dict | None = None):
        table = cls(metadata=metadata or {})
        header = next(iter(lines), None)
        if header is None or not header.startswith("depth\t"):
            raise ValueError("missing specificity table header")
        for raw in lines:
            line = raw.rstrip("\n")
            if not line:
                continue
            d, rel, score, support = line.split("\t")
            preds = tuple(graph.term_id(t) for t in rel.split("|"))
            table.depths.setdefault(int(d), []).append(SpecificityEntry(
                SemanticRelationship(preds), float(score), int(support)))
        return table


# -- exact computation (exhaustive enumeration) --------------------------

def _incoming_path_counts(g: Graph, node: int, depth: int,
                          origins: frozenset[int] | set[int]) -> tuple[int, int]:
    """(total, from-origins) counts of length-`depth` paths ending at node."""
    memo: dict[tuple[int, int], tuple[int, int]] = {}

    def rec(v: int, r: int) -> tuple[int, int]:
        if r == 0:
            return 1, 1 if v in origins else 0
        key = (v, r)
        hit = memo.get(key)
        if hit is not None:
            return hit
        total = fro = 0
        for _, u in g.in_adj[v]:
            a, b = rec(u, r - 1)
            total += a
            fro += b
        memo[key] = (total, fro)
        return total, fro

    return rec(node, depth)


def node_to_node_specificity(g: Graph, n1: int, n2: int, depth: int) -> float:
    """Fraction of all length-`depth` paths into n1 that originate at n2."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    g._check(n1)
    g._check(n2)
    total, fro = _incoming_path_counts(g, n1, depth, {n2})
    return fro / total if total else 0.0


def forward_reachable(g: Graph, sources, rel: SemanticRelationship) -> set[int]:
    """Nodes reachable from `sources` via the exact predicate sequence."""
    frontier = set(sources)
    for pred in rel.predicates:
        nxt: set[int] = set()
        for v in frontier:
            for p, o in g.out_adj[v]:
                if p == pred:
                    nxt.add(o)
        frontier = nxt
        if not frontier:
            break
    return frontier


def exact_specificity(g: Graph, rel: SemanticRelationship, t,
                      seeds=None) -> SpecificityEntry:
    """Exhaustive specificity: mean over reachable nodes of the fraction of
    all incoming length-d paths (any predicates) that originate in the seed
    set. Seeds default to every entity of type t."""
    if seeds is None:
        seeds = g.entities_of_type(t)
        if not seeds:
            name = t if isinstance(t, str) else g.terms[t]
            raise GraphError(f"type has no instances: {name!r}")
    origin = frozenset(seeds)
    reachable = forward_reachable(g, origin, rel)
    if not reachable:
        return SpecificityEntry(rel, 0.0, 0)
    total_paths = 0
    acc = 0.0
    for k in sorted(reachable):
        total, fro = _incoming_path_counts(g, k, rel.depth, origin)
        total_paths += total
        if total:
            acc += fro / total
    return SpecificityEntry(rel, acc / len(reachable), total_paths)


# -- bidirectional random-walk estimator ---------------------------------

def _candidate_rng(seed: int, rel: SemanticRelationship) -> random.Random:
    # Per-candidate stream: results do not depend on evaluation order.
    return random.Random(f"{seed}|{','.join(map(str, rel.predicates))}")


def _forward_walk(g: Graph, start: int, rel: SemanticRelationship,
                  rng: random.Random) -> int | None:
    v = start
    for pred in rel.predicates:
        matches = [o for p, o in g.out_adj[v] if p == pred]
        if not matches:
            return None
        v = rng.choice(matches)
    return v


def _reverse_walk(g: Graph, start: int, depth: int,
                  rng: random.Random) -> int | None:
    v = start
    for _ in range(depth):
        edges = g.in_adj[v]
        if not edges:
            return None
        v = rng.choice(edges)[1]
    return v


def estimate_specificity(g: Graph, candidates, seeds, t, n_walks: int,
                         seed: int = 0,
                         forward_retry_limit: int = 10) -> list[SpecificityEntry]:
    """Monte-Carlo specificity per candidate via bidirectional walks.

    Each of the n_walks trials forward-walks from a random seed along the
    candidate's exact predicate sequence, then reverse-walks the same depth
    along arbitrary incoming edges; the trial counts when it lands on a node
    of type t. Dead-ended trials (after forward retries) count as misses.
    """
    seeds = sorted(seeds)
    if not seeds:
        raise ValueError("seed set must be non-empty")
    if n_walks <= len(seeds):
        raise ValueError("n_walks must exceed the seed set size")
    type_set = g.entities_of_type(t)
    results = []
    for rel in candidates:
        rng = _candidate_rng(seed, rel)
        count = 0
        for _ in range(n_walks):
            v = None
            for _attempt in range(forward_retry_limit + 1):
                s = seeds[rng.randrange(len(seeds))]
                v = _forward_walk(g, s, rel, rng)
                if v is not None:
                    break
            if v is None:
                continue
            vp = _reverse_walk(g, v, rel.depth, rng)
            if vp is not None and vp in type_set:
                count += 1
        results.append(SpecificityEntry(rel, count / n_walks, n_walks))
    return results


# -- candidate selection -------------------------------------------------

def _reach_counts(g: Graph, seeds, predicates: tuple[int, ...]) -> dict[int, int]:
    """node -> number of concrete paths from the seed set realizing the
    predicate sequence (empty sequence: one path per seed)."""
    counts: dict[int, int] = {}
    for s in seeds:
        counts[s] = counts.get(s, 0) + 1
    for pred in predicates:
        nxt: dict[int, int] = {}
        for v, c in counts.items():
            for p, o in g.out_adj[v]:
                if p == pred:
                    nxt[o] = nxt.get(o, 0) + c
        counts = nxt
        if not counts:
            break
    return counts


def _enumerate_frequencies(g: Graph, seeds, depth: int,
                           excluded: frozenset[int]) -> dict[tuple[int, ...], int]:
    """Exact occurrence counts of all length-`depth` predicate sequences
    originating in the seed set (sequences using excluded predicates dropped)."""
    freq: dict[tuple[int, ...], int] = {}

    def rec(v: int, prefix: tuple[int, ...], remaining: int) -> None:
        if remaining == 0:
            freq[prefix] = freq.get(prefix, 0) + 1
            return
        for p, o in g.out_adj[v]:
            if p in excluded:
                continue
            rec(o, prefix + (p,), remaining - 1)

    for s in seeds:
        rec(s, (), depth)
    return freq


def select_paths(g: Graph, seeds, depth: int, n_paths: int,
                 prev: list[SpecificityEntry] | None = None,
                 threshold: float = 0.5,
                 include_type_edges: bool = False) -> list[SemanticRelationship]:
    """Candidate relationships of the given depth, ranked by frequency of
    occurrence from the seed set.

    With `prev` (entries from depth-1 shallower), only one-predicate
    extensions of above-threshold entries are considered; otherwise all
    length-`depth` sequences from the seeds are enumerated. Ties are broken
    lexicographically by predicate-id sequence.
    """
    if not seeds:
        raise ValueError("seed set must be non-empty")
    excluded = frozenset() if include_type_edges or g.rdf_type_id is None \
        else frozenset({g.rdf_type_id})
    if prev is None:
        freq = _enumerate_frequencies(g, seeds, depth, excluded)
    else:
        freq = {}
        for entry in prev:
            if entry.score < threshold:
                continue
            if entry.relationship.depth != depth - 1:
                raise ValueError("prev entries must have depth one less")
            prefix = entry.relationship.predicates
            for v, c in _reach_counts(g, seeds, prefix).items():
                for p, _ in g.out_adj[v]:
                    if p in excluded:
                        continue
                    seq = prefix + (p,)
                    freq[seq] = freq.get(seq, 0) + c
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    return [SemanticRelationship(seq) for seq, _ in ranked[:n_paths]]


# -- full ranking pipeline -----------------------------------------------

def rank_by_specificity(g: Graph, t, params: EstimatorParams) -> SpecificityTable:
    """Ranked specificity tables for depths 1..max_depth.

    Depth 1 candidates come from frequency enumeration; deeper depths extend
    only entries whose score met the threshold at the previous depth.
    """
    if isinstance(t, str):
        t_id = g.term_id(t)
    else:
        t_id = t
    seeds = sorted(g.sample_entities(t_id, params.seed_set_size, params.seed))
    table = SpecificityTable(metadata={
        "type": g.terms[t_id],
        "seed": params.seed,
        "seed_set_size": len(seeds),
        "n_walks": params.n_walks,
        "threshold": params.threshold,
        "max_depth": params.max_depth,
        "candidates_per_depth": params.candidates_per_depth,
        "forward_retry_limit": params.forward_retry_limit,
        "mode": params.mode,
        "estimator_note": ("alg2 weights destinations by forward-path "
                           "multiplicity; eq2 averages uniformly over "
                           "distinct reachable nodes"),
        "graph_checksum": g.checksum(),
    })
    prev: list[SpecificityEntry] | None = None
    for depth in range(1, params.max_depth + 1):
        candidates = select_paths(
            g, seeds, depth, params.candidates_at(depth), prev=prev,
            threshold=params.threshold,
            include_type_edges=params.include_type_edges)
        if not candidates:
            table.depths[depth] = []
            prev = []
            continue
        if params.mode == "eq2":
            entries = [exact_specificity(g, rel, t_id, seeds=seeds)
                       for rel in candidates]
        else:
            entries = estimate_specificity(
                g, candidates, seeds, t_id, params.n_walks,
                seed=params.seed,
                forward_retry_limit=params.forward_retry_limit)
        entries.sort(key=lambda e: (-e.score, e.relationship.predicates))
        table.depths[depth] = entries
        prev = entries
    return table
