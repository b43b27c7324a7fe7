import pytest

from specwalk.graph import RDF_TYPE, GraphBuilder
from specwalk.synth import franchise_graph, layered_graph

EX = "http://x/"
TYPE_T = EX + "T"


def build(triples, rdf_type=RDF_TYPE):
    """Graph from (s, p, o[, literal]) tuples of short local names."""
    b = GraphBuilder(rdf_type=rdf_type)
    for t in triples:
        s, p, o = t[:3]
        b.add(s, p, o, object_literal=len(t) > 3 and t[3])
    return b.build()


@pytest.fixture
def chain_graph():
    # f (type T) --p--> x ; single deterministic path
    return build([
        (EX + "f", RDF_TYPE, TYPE_T),
        (EX + "f", EX + "p", EX + "x"),
    ])


@pytest.fixture(scope="session")
def franchise():
    return franchise_graph(seed=1)


@pytest.fixture(scope="session")
def layered():
    return layered_graph(seed=1)
