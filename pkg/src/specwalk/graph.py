"""Immutable, integer-indexed RDF multigraph with forward/reverse adjacency.

Terms (IRIs, blank node labels, literal lexical forms) are interned to dense
integer ids. After construction the graph is never mutated, so it can be
shared freely across threads; random sampling takes an explicit seed so reads
stay side-effect free.
"""
from __future__ import annotations

import hashlib
import logging
import random
import struct

log = logging.getLogger(__name__)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

SNAPSHOT_MAGIC = b"SWSNAP01"


class GraphError(Exception):
    """Base class for graph construction/lookup errors."""


class UnknownTermError(GraphError):
    """Raised when a term id or term string is not interned in the graph."""


class GraphBuilder:
    """Single-writer builder; produces an immutable Graph."""

    def __init__(self, rdf_type: str = RDF_TYPE):
        self.rdf_type = rdf_type
        self._terms: list[str] = []
        self._literal: list[bool] = []
        self._ids: dict[str, int] = {}
        self._triples: set[tuple[int, int, int]] = set()

    def intern(self, term: str, literal: bool = False) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._ids[term] = tid
            self._terms.append(term)
            self._literal.append(literal)
        elif self._literal[tid] != literal:
            raise GraphError(f"term interned as both literal and resource: {term!r}")
        return tid

    def add(self, subject: str, predicate: str, obj: str,
            object_literal: bool = False) -> None:
        s = self.intern(subject, literal=False)
        p = self.intern(predicate, literal=False)
        o = self.intern(obj, literal=object_literal)
        self._triples.add((s, p, o))

    def build(self) -> "Graph":
        return Graph(self._terms, self._literal, self._triples, self.rdf_type)


class Graph:
    """Immutable triple store with out/in adjacency and a direct-type index."""

    def __init__(self, terms: list[str], literal: list[bool],
                 triples: set[tuple[int, int, int]], rdf_type: str = RDF_TYPE):
        self.terms = terms
        self.literal = literal
        self.triples = frozenset(triples)
        self.rdf_type = rdf_type
        self._ids = {t: i for i, t in enumerate(terms)}
        self.rdf_type_id = self._ids.get(rdf_type)
        n = len(terms)
        self.out_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.in_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.type_index: dict[int, set[int]] = {}
        for s, p, o in sorted(triples):
            if self.literal[s]:
                raise GraphError(f"literal in subject position: {terms[s]!r}")
            if self.literal[p]:
                raise GraphError(f"literal in predicate position: {terms[p]!r}")
            self.out_adj[s].append((p, o))
            self.in_adj[o].append((p, s))
            if p == self.rdf_type_id:
                self.type_index.setdefault(o, set()).add(s)
        self.report = None  # set by parsers
        self._checksum: str | None = None
        self._pred_freq: dict[int, int] | None = None
        self._types_of: list[frozenset[int]] | None = None

    # -- lookups ---------------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def n_triples(self) -> int:
        return len(self.triples)

    def has_term(self, term: str) -> bool:
        return term in self._ids

    def term_id(self, term: str) -> int:
        try:
            return self._ids[term]
        except KeyError:
            raise UnknownTermError(f"term not in graph: {term!r}") from None

    def term(self, tid: int) -> str:
        self._check(tid)
        return self.terms[tid]

    def is_literal(self, tid: int) -> bool:
        self._check(tid)
        return self.literal[tid]

    def _check(self, tid: int) -> None:
        if not isinstance(tid, int) or tid < 0 or tid >= len(self.terms):
            raise UnknownTermError(f"unknown term id: {tid!r}")

    def out_neighbors(self, v: int) -> list[tuple[int, int]]:
        """All (predicate, object) pairs for triples with subject v."""
        self._check(v)
        return self.out_adj[v]

    def in_neighbors(self, v: int) -> list[tuple[int, int]]:
        """All (predicate, subject) pairs for triples with object v."""
        self._check(v)
        return self.in_adj[v]

    def types_of(self, v: int) -> frozenset[int]:
        """Directly asserted rdf:type objects of v (no inference)."""
        self._check(v)
        if self._types_of is None:
            tmap: list[frozenset[int]] = []
            for node in range(len(self.terms)):
                ts = [o for (p, o) in self.out_adj[node] if p == self.rdf_type_id]
                tmap.append(frozenset(ts))
            self._types_of = tmap
        return self._types_of[v]

    def entities_of_type(self, t) -> frozenset[int]:
        """Entities with a direct rdf:type assertion to t; empty if t unknown."""
        if isinstance(t, str):
            tid = self._ids.get(t)
            if tid is None:
                return frozenset()
            t = tid
        else:
            self._check(t)
        return frozenset(self.type_index.get(t, ()))

    def sample_entities(self, t, n: int, seed: int) -> list[int]:
        """Sample n distinct type-t entities uniformly; deterministic in seed.

        Returns all members (shuffled) when fewer than n exist; raises for a
        type with zero instances.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        members = sorted(self.entities_of_type(t))
        if not members:
            name = t if isinstance(t, str) else self.terms[t]
            raise GraphError(f"type has no instances: {name!r}")
        rng = random.Random(seed)
        if len(members) <= n:
            if len(members) < n:
                log.warning("requested %d entities of type, only %d exist",
                            n, len(members))
            rng.shuffle(members)
            return members
        return rng.sample(members, n)

    def predicate_frequency(self) -> dict[int, int]:
        """Global triple count per predicate id."""
        if self._pred_freq is None:
            freq: dict[int, int] = {}
            for _, p, _ in self.triples:
                freq[p] = freq.get(p, 0) + 1
            self._pred_freq = freq
        return self._pred_freq

    # -- rendering & checksum --------------------------------------------

    def render_term(self, tid: int) -> str:
        """N-Triples surface form of a term."""
        t = self.terms[tid]
        if self.literal[tid] or t.startswith("_:"):
            return t
        return f"<{t}>"

    def render_token(self, tid: int) -> str:
        """Corpus/vocabulary token for a term: raw term with whitespace folded.

        Corpus lines are whitespace-separated, so embedded whitespace in
        literals is replaced by underscores.
        """
        t = self.terms[tid]
        return "_".join(t.split()) if any(c.isspace() for c in t) else t

    def checksum(self) -> str:
        """Content-based sha256 over the sorted triple set (id-order independent)."""
        if self._checksum is None:
            h = hashlib.sha256()
            lines = sorted(
                f"{self.render_term(s)}\t{self.render_term(p)}\t{self.render_term(o)}"
                for s, p, o in self.triples
            )
            for line in lines:
                h.update(line.encode("utf-8"))
                h.update(b"\n")
            self._checksum = h.hexdigest()
        return self._checksum


# -- TSV edge lists (synthetic test graphs) ------------------------------

def parse_tsv(lines, rdf_type: str = RDF_TYPE) -> Graph:
    """Build a graph from TSV rows: subject, predicate, object, is_literal."""
    b = GraphBuilder(rdf_type=rdf_type)
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4 or parts[3] not in ("0", "1"):
            raise GraphError(f"bad TSV row at line {lineno}: {line!r}")
        b.add(parts[0], parts[1], parts[2], object_literal=parts[3] == "1")
    return b.build()


def serialize_tsv(graph: Graph, out) -> None:
    lines = sorted(
        f"{graph.terms[s]}\t{graph.terms[p]}\t{graph.terms[o]}\t"
        f"{'1' if graph.literal[o] else '0'}\n"
        for s, p, o in graph.triples)
    out.writelines(lines)


# -- binary snapshot -----------------------------------------------------
#
# Layout (little-endian):
#   8s   magic "SWSNAP01"
#   u32  term count
#   u64  triple count
#   u16  rdf:type IRI length, then the IRI bytes
#   per term: u32 utf-8 length, bytes, u8 literal flag
#   per triple (sorted ascending): 3 x u32 (subject, predicate, object)

def write_snapshot(graph: Graph, path: str) -> None:
    with open(path, "wb") as f:
        f.write(SNAPSHOT_MAGIC)
        f.write(struct.pack("<IQ", len(graph.terms), len(graph.triples)))
        rt = graph.rdf_type.encode("utf-8")
        f.write(struct.pack("<H", len(rt)))
        f.write(rt)
        for term, lit in zip(graph.terms, graph.literal):
            tb = term.encode("utf-8")
            f.write(struct.pack("<I", len(tb)))
            f.write(tb)
            f.write(struct.pack("<B", 1 if lit else 0))
        for s, p, o in sorted(graph.triples):
            f.write(struct.pack("<III", s, p, o))


def read_snapshot(path: str) -> Graph:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != SNAPSHOT_MAGIC:
            raise GraphError(f"not a graph snapshot: {path}")
        n_terms, n_triples = struct.unpack("<IQ", f.read(12))
        (rt_len,) = struct.unpack("<H", f.read(2))
        rdf_type = f.read(rt_len).decode("utf-8")
        terms: list[str] = []
        literal: list[bool] = []
        for _ in range(n_terms):
            (tlen,) = struct.unpack("<I", f.read(4))
            terms.append(f.read(tlen).decode("utf-8"))
            (flag,) = struct.unpack("<B", f.read(1))
            literal.append(bool(flag))
        triples = set()
        buf = f.read(12 * n_triples)
        for i in range(n_triples):
            triples.add(struct.unpack_from("<III", buf, 12 * i))
    return Graph(terms, literal, triples, rdf_type)
