"""PageRank scores for the PageRank-biased walk baseline.

Scores can be computed in-graph by power iteration (synthetic graphs) or
loaded from an external TSV score file. Literals are excluded from the chain:
only resource nodes take part, and edges to literals carry no rank.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError

log = logging.getLogger(__name__)


@dataclass
class ScoreMap:
    """Term-keyed node scores; `normalized` means they sum to 1."""

    scores: dict[str, float]
    normalized: bool

    def bind(self, graph: Graph) -> dict[int, float]:
        """Resolve term strings to graph ids; unmatched entries are reported."""
        bound: dict[int, float] = {}
        unmatched = 0
        for term, score in self.scores.items():
            if graph.has_term(term):
                bound[graph.term_id(term)] = score
            else:
                unmatched += 1
        if unmatched:
            log.warning("%d score entries did not match any graph term", unmatched)
        return bound


def compute_pagerank(graph: Graph, damping: float = 0.85,
                     epsilon: float = 1e-12, max_iters: int = 200) -> ScoreMap:
    """Standard power iteration with uniform teleport over resource nodes.

    Dangling mass is redistributed uniformly; iteration stops when the L1
    change drops below epsilon. Output is normalized.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must be in (0,1)")
    nodes = [i for i in range(graph.n_terms) if not graph.literal[i]]
    if not nodes:
        raise GraphError("graph has no resource nodes")
    index = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    # resource-to-resource edges only
    src, dst = [], []
    out_deg = np.zeros(n)
    for v in nodes:
        i = index[v]
        for _, o in graph.out_adj[v]:
            if not graph.literal[o]:
                src.append(i)
                dst.append(index[o])
                out_deg[i] += 1
    src_a = np.asarray(src, dtype=np.int64)
    dst_a = np.asarray(dst, dtype=np.int64)
    inv_deg = np.where(out_deg > 0, 1.0 / np.maximum(out_deg, 1), 0.0)
    dangling = out_deg == 0
    rank = np.full(n, 1.0 / n)
    for _ in range(max_iters):
        contrib = rank * inv_deg
        new = np.zeros(n)
        np.add.at(new, dst_a, contrib[src_a])
        new += rank[dangling].sum() / n
        new = damping * new + (1.0 - damping) / n
        delta = np.abs(new - rank).sum()
        rank = new
        if delta < epsilon:
            break
    rank = rank / rank.sum()
    return ScoreMap({graph.terms[v]: float(rank[index[v]]) for v in nodes},
                    normalized=True)


def load_scores(lines, strict: bool = False) -> ScoreMap:
    """Read raw (non-normalized) scores from TSV lines `term<TAB>score`."""
    scores: dict[str, float] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        try:
            if len(parts) != 2:
                raise ValueError("expected two columns")
            term, value = parts[0], float(parts[1])
        except ValueError as exc:
            if strict:
                raise GraphError(f"bad score row at line {lineno}: {line!r}") from exc
            log.warning("skipping bad score row at line %d: %r", lineno, line)
            continue
        if term in scores:
            log.warning("duplicate score entry for %r at line %d; keeping last",
                        term, lineno)
        scores[term] = value
    return ScoreMap(scores, normalized=False)


def save_scores(score_map: ScoreMap, out) -> None:
    for term in sorted(score_map.scores):
        out.write(f"{term}\t{score_map.scores[term]:.12g}\n")
