import io

import pytest

from specwalk.graph import RDF_TYPE
from specwalk.specificity import (SemanticRelationship, SpecificityEntry,
                                  SpecificityTable)
from specwalk.walks import (Walk, WalkStrategy, corpus_stats, extract_corpus,
                            extract_walks, prune_check, read_corpus_lines,
                            write_corpus, write_stats_csv)

from conftest import EX, TYPE_T, build

FILM = EX + "Film"
PERSON = EX + "Person"
SYNTH = "http://synth.specwalk.local/"


def film_graph():
    return build([
        (EX + "film1", RDF_TYPE, FILM),
        (EX + "film2", RDF_TYPE, FILM),
        (EX + "person", RDF_TYPE, PERSON),
        (EX + "film1", EX + "director", EX + "person"),
        (EX + "person", EX + "directed", EX + "film1"),
        (EX + "person", EX + "directed", EX + "film2"),
        (EX + "film1", EX + "sequelOf", EX + "film2"),
        (EX + "film2", EX + "director", EX + "person"),
    ])


def walk_of(g, *names):
    return Walk(tuple(g.term_id(EX + n) for n in names))


class TestWalkObject:
    def test_token_shape_validation(self):
        with pytest.raises(ValueError):
            Walk((1,))
        with pytest.raises(ValueError):
            Walk((1, 2))
        with pytest.raises(ValueError):
            Walk((1, 2, 3, 4))

    def test_accessors(self):
        w = Walk((10, 1, 11, 2, 12))
        assert w.nodes == (10, 11, 12)
        assert w.predicates == (1, 2)
        assert w.depth == 2


class TestPruning:
    def test_root_revisit(self):
        g = film_graph()
        w = walk_of(g, "film1", "director", "person", "directed", "film1")
        assert prune_check(w, "none", g)
        assert not prune_check(w, "NRSE", g)
        assert not prune_check(w, "UE", g)

    def test_same_type_terminal(self):
        g = film_graph()
        w = walk_of(g, "film1", "director", "person", "directed", "film2")
        assert prune_check(w, "NRSE", g)
        assert prune_check(w, "UE", g)
        # terminal may share the root's type, intermediates may not
        assert prune_check(w, "NRST", g)
        assert not prune_check(w, "UET", g)

    def test_same_type_intermediate(self):
        g = film_graph()
        w = walk_of(g, "film1", "sequelOf", "film2", "director", "person")
        assert prune_check(w, "UE", g)
        assert not prune_check(w, "NRST", g)
        assert not prune_check(w, "UET", g)

    def test_untyped_nodes_pass_type_schemes(self):
        g = build([(EX + "a", EX + "p", EX + "b"),
                   (EX + "b", EX + "p", EX + "c")])
        w = walk_of(g, "a", "p", "b", "p", "c")
        assert prune_check(w, "NRST", g)
        assert prune_check(w, "UET", g)

    def test_unknown_scheme(self):
        g = film_graph()
        w = walk_of(g, "film1", "director", "person")
        with pytest.raises(ValueError):
            prune_check(w, "nrse", g)

    def test_acceptance_nesting(self, franchise):
        # UE-accepted walks are NRSE-accepted; UET-accepted are NRST-accepted
        g, info = franchise
        films = sorted(g.entities_of_type(info["type"]))
        strategy = WalkStrategy(depth=3, walks_per_entity=200)
        for entity in films[:6]:
            for walk in extract_walks(g, entity, strategy, seed=3).walks:
                if prune_check(walk, "UE", g):
                    assert prune_check(walk, "NRSE", g)
                if prune_check(walk, "UET", g):
                    assert prune_check(walk, "NRST", g)

    def test_restrictiveness_counts(self, franchise):
        g, info = franchise
        films = sorted(g.entities_of_type(info["type"]))
        accepted = {}
        for scheme in ("none", "NRSE", "UE", "NRST", "UET"):
            strategy = WalkStrategy(pruning=scheme, depth=3,
                                    walks_per_entity=300)
            corpus = extract_corpus(g, films[:8], strategy, seed=5)
            accepted[scheme] = len(corpus.walks)
        assert accepted["none"] >= accepted["NRSE"] >= accepted["UE"]
        assert accepted["none"] >= accepted["NRST"] >= accepted["UET"]


class TestExtraction:
    def test_single_chain(self):
        # no type edge, so the p edge is the only choice
        g = build([(EX + "f", EX + "p", EX + "x")])
        strategy = WalkStrategy(depth=1, walks_per_entity=5)
        corpus = extract_walks(g, g.term_id(EX + "f"), strategy, seed=0)
        assert len(corpus.walks) == 5
        want = (g.term_id(EX + "f"), g.term_id(EX + "p"), g.term_id(EX + "x"))
        assert all(w.tokens == want for w in corpus.walks)

    def test_shorter_walk_kept_at_dead_end(self, chain_graph):
        g = chain_graph
        strategy = WalkStrategy(depth=3, walks_per_entity=3)
        corpus = extract_walks(g, g.term_id(EX + "f"), strategy, seed=0)
        # x has no outgoing edges, so depth-3 attempts stop after one hop
        assert {w.depth for w in corpus.walks} <= {1, 2}

    def test_no_outgoing_edges_empty(self, chain_graph):
        g = chain_graph
        strategy = WalkStrategy(depth=2, walks_per_entity=10)
        corpus = extract_walks(g, g.term_id(EX + "x"), strategy, seed=0)
        assert corpus.walks == []
        assert corpus.stats[0].attempts == 10

    def test_star_covers_leaves(self):
        g = build([(EX + "root", EX + "p", EX + f"leaf{i}") for i in range(10)])
        strategy = WalkStrategy(depth=1, walks_per_entity=500)
        corpus = extract_walks(g, g.term_id(EX + "root"), strategy, seed=1)
        assert len(corpus.walks) == 500
        assert len({w.tokens for w in corpus.walks}) >= 9

    def test_walks_replay_as_triples(self, franchise):
        g, info = franchise
        films = sorted(g.entities_of_type(info["type"]))
        strategy = WalkStrategy(depth=3, walks_per_entity=100)
        for walk in extract_corpus(g, films[:5], strategy, seed=2).walks:
            for i in range(0, len(walk.tokens) - 2, 2):
                v, p, o = walk.tokens[i:i + 3]
                assert (v, p, o) in g.triples

    def test_deterministic_across_workers(self, franchise):
        g, info = franchise
        films = sorted(g.entities_of_type(info["type"]))
        strategy = WalkStrategy(depth=2, walks_per_entity=50)
        seq = extract_corpus(g, films, strategy, seed=9, workers=1)
        par = extract_corpus(g, films, strategy, seed=9, workers=4)
        assert [w.tokens for w in seq.walks] == [w.tokens for w in par.walks]

    def test_deterministic_in_seed_only(self, chain_graph):
        g = build([(EX + "root", EX + "p", EX + f"leaf{i}") for i in range(6)])
        strategy = WalkStrategy(depth=1, walks_per_entity=20)
        a = extract_walks(g, g.term_id(EX + "root"), strategy, seed=3)
        b = extract_walks(g, g.term_id(EX + "root"), strategy, seed=3)
        c = extract_walks(g, g.term_id(EX + "root"), strategy, seed=4)
        assert [w.tokens for w in a.walks] == [w.tokens for w in b.walks]
        assert [w.tokens for w in a.walks] != [w.tokens for w in c.walks]


class TestBiases:
    def test_frequency_bias_proportions(self):
        triples = [(EX + "root", EX + "p", EX + "a"),
                   (EX + "root", EX + "q", EX + "b")]
        triples += [(EX + f"s{i}", EX + "p", EX + f"t{i}") for i in range(8)]
        g = build(triples)
        strategy = WalkStrategy(bias="frequency", depth=1, walks_per_entity=2000)
        corpus = extract_walks(g, g.term_id(EX + "root"), strategy, seed=0)
        p_walks = sum(w.predicates[0] == g.term_id(EX + "p")
                      for w in corpus.walks)
        # edge weights 9:1 by global predicate frequency
        assert p_walks / len(corpus.walks) == pytest.approx(0.9, abs=0.03)

    def test_pagerank_bias_prefers_high_score(self):
        g = build([(EX + "root", EX + "p", EX + "hi"),
                   (EX + "root", EX + "p", EX + "lo")])
        scores = {g.term_id(EX + "hi"): 0.9, g.term_id(EX + "lo"): 0.1}
        strategy = WalkStrategy(bias="pagerank", depth=1, walks_per_entity=2000,
                                pagerank_scores=scores)
        corpus = extract_walks(g, g.term_id(EX + "root"), strategy, seed=0)
        hi = sum(w.nodes[-1] == g.term_id(EX + "hi") for w in corpus.walks)
        assert hi / len(corpus.walks) == pytest.approx(0.9, abs=0.03)

    def test_pagerank_unscored_literal_never_taken(self):
        g = build([(EX + "root", EX + "p", '"literal leaf"', True),
                   (EX + "root", EX + "p", EX + "node")])
        scores = {g.term_id(EX + "node"): 0.5}
        strategy = WalkStrategy(bias="pagerank", depth=1, walks_per_entity=200,
                                pagerank_scores=scores)
        corpus = extract_walks(g, g.term_id(EX + "root"), strategy, seed=0)
        assert len(corpus.walks) == 200
        assert all(w.nodes[-1] == g.term_id(EX + "node") for w in corpus.walks)

    def test_specificity_bias_follows_templates(self, franchise):
        g, info = franchise
        chain = tuple(g.term_id(p) for p in info["specific_chain"])
        table = SpecificityTable(depths={2: [
            SpecificityEntry(SemanticRelationship(chain), 1.0, 100),
            SpecificityEntry(SemanticRelationship(
                (g.term_id(SYNTH + "p/director"),
                 g.term_id(SYNTH + "p/birthPlace"))), 0.2, 100),
        ]})
        strategy = WalkStrategy(bias="specificity", depth=2,
                                specificity_table=table, threshold=0.5,
                                walks_per_entity=100)
        films = sorted(g.entities_of_type(info["type"]))
        corpus = extract_walks(g, films[0], strategy, seed=0)
        assert len(corpus.walks) == 100
        assert all(w.predicates == chain for w in corpus.walks)

    def test_specificity_bias_no_templates_empty(self, chain_graph):
        g = chain_graph
        table = SpecificityTable(depths={1: []})
        strategy = WalkStrategy(bias="specificity", depth=1,
                                specificity_table=table, walks_per_entity=50)
        corpus = extract_walks(g, g.term_id(EX + "f"), strategy, seed=0)
        assert corpus.walks == []

    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            WalkStrategy(bias="specificity")
        with pytest.raises(ValueError):
            WalkStrategy(bias="pagerank")
        with pytest.raises(ValueError):
            WalkStrategy(bias="degree")
        with pytest.raises(ValueError):
            WalkStrategy(pruning="unique")
        with pytest.raises(ValueError):
            WalkStrategy(depth=0)


class TestCorpusIO:
    def test_stats_empty_and_duplicates(self, chain_graph):
        from specwalk.walks import WalkCorpus
        empty = corpus_stats(WalkCorpus())
        assert (empty.walks, empty.distinct, empty.mean_depth) == (0, 0, 0.0)
        g = build([(EX + "f", EX + "p", EX + "x")])
        strategy = WalkStrategy(depth=1, walks_per_entity=4)
        stats = corpus_stats(extract_walks(g, g.term_id(EX + "f"), strategy, 0))
        assert stats.walks == 4
        assert stats.distinct == 1
        assert stats.mean_depth == 1.0

    def test_write_read_round_trip(self):
        g = build([(EX + "f", EX + "p", EX + "x")])
        strategy = WalkStrategy(depth=1, walks_per_entity=2)
        corpus = extract_walks(g, g.term_id(EX + "f"), strategy, 0)
        buf = io.StringIO()
        write_corpus(g, corpus, buf, header={"bias": "uniform", "depth": 1})
        buf.seek(0)
        lines = list(read_corpus_lines(buf))
        assert len(lines) == 2
        assert lines[0] == [EX + "f", EX + "p", EX + "x"]

    def test_literal_whitespace_folded_in_tokens(self):
        g = build([(EX + "f", EX + "p", '"two words"', True)])
        from specwalk.walks import WalkCorpus
        w = Walk((g.term_id(EX + "f"), g.term_id(EX + "p"),
                  g.term_id('"two words"')))
        buf = io.StringIO()
        write_corpus(g, WalkCorpus(walks=[w]), buf)
        tokens = buf.getvalue().split(" ")
        assert len(tokens) == 3
        assert tokens[2].rstrip("\n") == '"two_words"'

    def test_stats_csv_shape(self):
        g = build([(EX + "f", EX + "p", EX + "x")])
        strategy = WalkStrategy(depth=1, walks_per_entity=3)
        corpus = extract_walks(g, g.term_id(EX + "f"), strategy, 0)
        buf = io.StringIO()
        write_stats_csv(g, corpus, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "entity,attempts,walks,distinct,millis"
        fields = lines[1].split(",")
        assert fields[0] == EX + "f"
        assert fields[1:4] == ["3", "3", "1"]
