import io
import itertools
import random

import numpy as np
import pytest

from specwalk.skipgram import (EmbeddingModel, TrainConfig, Vocabulary,
                               build_vocab, context_pairs, init_model,
                               sample_negatives, sgns_step, train,
                               unigram_table)


def two_clique_corpus(seed=0, lines=300):
    """Two token communities that co-occur internally but never across."""
    rng = random.Random(seed)
    a = [f"a{i}" for i in range(6)]
    b = [f"b{i}" for i in range(6)]
    corpus = []
    for i in range(lines):
        group = a if i % 2 == 0 else b
        corpus.append(rng.choices(group, k=5))
    return corpus, a, b


def cosine(x, y):
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return 0.0
    return float(np.dot(x, y) / (nx * ny))


class TestVocab:
    def test_counts_and_order(self):
        v = build_vocab([["b", "a", "b"], ["c", "b", "a"]])
        assert v.tokens == ["b", "a", "c"]  # count desc, then token asc
        assert list(v.counts) == [3, 2, 1]
        assert v.index["b"] == 0

    def test_min_count_filter(self):
        v = build_vocab([["a", "a", "b"]], min_count=2)
        assert v.tokens == ["a"]
        assert "b" not in v

    def test_tie_broken_by_token(self):
        v = build_vocab([["z", "a"]])
        assert v.tokens == ["a", "z"]


class TestContextPairs:
    def test_window_one(self):
        got = context_pairs(["a", "b", "c"], 1)
        assert got == [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")]

    def test_single_token_no_pairs(self):
        assert context_pairs(["a"], 5) == []

    def test_wide_window_all_ordered_pairs(self):
        got = context_pairs(["a", "b", "c", "d"], 10)
        assert len(got) == 12
        assert set(got) == {(x, y) for x in "abcd" for y in "abcd" if x != y}

    def test_invalid_window(self):
        with pytest.raises(ValueError):
            context_pairs(["a", "b"], 0)


class TestNegativeSampling:
    def test_table_matches_power_law(self):
        v = build_vocab([["a"] * 16 + ["b"]])
        cum = unigram_table(v, power=0.75)
        wa, wb = 16 ** 0.75, 1.0
        assert cum[0] == pytest.approx(wa / (wa + wb))
        assert cum[-1] == 1.0

    def test_empirical_distribution_total_variation(self):
        rng = random.Random(1)
        counts = {f"tok{i:03d}": rng.randrange(1, 200) for i in range(100)}
        v = Vocabulary(counts)
        cum = unigram_table(v, power=0.75)
        weights = v.counts.astype(float) ** 0.75
        expected = weights / weights.sum()
        gen = np.random.Generator(np.random.PCG64(7))
        n = 1_000_000
        draws = sample_negatives(cum, n, gen)
        observed = np.bincount(draws, minlength=len(v)) / n
        tv = 0.5 * np.abs(observed - expected).sum()
        assert tv <= 0.01


class TestGradients:
    def test_zero_lr_leaves_model_unchanged(self):
        v = build_vocab([["a", "b", "c"]])
        model = init_model(v, TrainConfig(dim=8, seed=1))
        w_in_before = model.w_in.copy()
        w_out_before = model.w_out.copy()
        sgns_step(model, 0, 1, np.array([2]), lr=0.0)
        assert np.array_equal(model.w_in, w_in_before)
        assert np.array_equal(model.w_out, w_out_before)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.Generator(np.random.PCG64(3))
        v = build_vocab([[f"t{i}" for i in range(10)]])
        h = 1e-5

        def objective(w_in, w_out, center, context, negs):
            idx = [context] + list(negs)
            dots = w_out[idx] @ w_in[center]
            f = 1.0 / (1.0 + np.exp(-dots))
            return np.log(f[0]) + np.log(1.0 - f[1:]).sum()

        for case in range(50):
            model = init_model(v, TrainConfig(dim=8, seed=case))
            model.w_in = rng.normal(0, 0.5, model.w_in.shape).astype(np.float64)
            model.w_out = rng.normal(0, 0.5, model.w_out.shape).astype(np.float64)
            center = int(rng.integers(10))
            context = int(rng.integers(10))
            negs = rng.integers(0, 10, size=3)
            base_in = model.w_in.copy()
            base_out = model.w_out.copy()
            lr = 1.0
            sgns_step(model, center, context, negs, lr)
            analytic_in = model.w_in - base_in
            analytic_out = model.w_out - base_out
            # check several coordinates of each matrix numerically
            for matrix, analytic in ((0, analytic_in), (1, analytic_out)):
                flat = np.argwhere(np.abs(analytic) > 1e-9)
                if len(flat) == 0:
                    continue
                for r, c in flat[:: max(1, len(flat) // 5)]:
                    wp_in, wp_out = base_in.copy(), base_out.copy()
                    wm_in, wm_out = base_in.copy(), base_out.copy()
                    if matrix == 0:
                        wp_in[r, c] += h
                        wm_in[r, c] -= h
                    else:
                        wp_out[r, c] += h
                        wm_out[r, c] -= h
                    num = (objective(wp_in, wp_out, center, context, negs)
                           - objective(wm_in, wm_out, center, context, negs)) / (2 * h)
                    got = analytic[r, c] / lr
                    assert got == pytest.approx(num, rel=1e-4, abs=1e-7)

    def test_repeated_positive_updates_raise_score(self):
        v = build_vocab([["a", "b"]])
        model = init_model(v, TrainConfig(dim=16, seed=0))
        def score():
            return float(model.w_out[1] @ model.w_in[0])
        prev = score()
        for _ in range(20):
            sgns_step(model, 0, 1, np.array([], dtype=np.int64), lr=0.1)
            cur = score()
            assert cur > prev
            prev = cur

    def test_duplicate_negative_indices_accumulate(self):
        v = build_vocab([["a", "b", "c"]])
        model = init_model(v, TrainConfig(dim=4, seed=2))
        model.w_out += 0.1
        single = init_model(v, TrainConfig(dim=4, seed=2))
        single.w_out += 0.1
        sgns_step(model, 0, 1, np.array([2, 2]), lr=0.5)
        # two identical negatives must apply twice the single-negative pull
        sgns_step(single, 0, 1, np.array([2]), lr=0.5)
        moved_twice = model.w_out[2] - 0.1
        moved_once = single.w_out[2] - 0.1
        assert np.allclose(moved_twice, 2 * moved_once)


class TestTraining:
    def test_epochs_zero_returns_initialization(self):
        corpus, _, _ = two_clique_corpus()
        cfg = TrainConfig(dim=8, window=2, negatives=2, epochs=0, seed=4)
        model = train(corpus, cfg)
        fresh = init_model(model.vocab, cfg)
        assert np.array_equal(model.w_in, fresh.w_in)
        assert model.epoch_losses == []

    def test_initialization_ranges(self):
        v = build_vocab([["a", "b", "c"]])
        cfg = TrainConfig(dim=50, seed=9)
        model = init_model(v, cfg)
        bound = 0.5 / cfg.dim
        assert model.w_in.dtype == np.float32
        assert np.abs(model.w_in).max() <= bound
        assert not np.array_equal(model.w_in[0], model.w_in[1])
        assert np.count_nonzero(model.w_out) == 0

    def test_two_cliques_separate(self):
        corpus, a, b = two_clique_corpus()
        model = train(corpus, TrainConfig(dim=16, window=4, negatives=5,
                                          epochs=3, seed=0))
        intra = [cosine(model.vector(x), model.vector(y))
                 for x, y in itertools.combinations(a, 2)]
        inter = [cosine(model.vector(x), model.vector(y))
                 for x in a for y in b]
        assert min(intra) > max(inter)

    def test_loss_decreases_over_epochs(self):
        corpus, _, _ = two_clique_corpus()
        model = train(corpus, TrainConfig(dim=16, window=4, negatives=5,
                                          epochs=5, seed=0))
        assert len(model.epoch_losses) == 5
        assert model.epoch_losses[4] < model.epoch_losses[0]

    def test_bit_deterministic(self):
        corpus, _, _ = two_clique_corpus()
        cfg = TrainConfig(dim=8, window=3, negatives=3, epochs=2, seed=11)
        m1 = train(corpus, cfg)
        m2 = train(corpus, cfg)
        assert np.array_equal(m1.w_in, m2.w_in)
        assert np.array_equal(m1.w_out, m2.w_out)
        m3 = train(corpus, TrainConfig(dim=8, window=3, negatives=3, epochs=2,
                                       seed=12))
        assert not np.array_equal(m1.w_in, m3.w_in)

    def test_all_values_finite(self):
        corpus, _, _ = two_clique_corpus(lines=100)
        model = train(corpus, TrainConfig(dim=8, window=3, negatives=3,
                                          epochs=2, lr=0.5, seed=0))
        assert np.isfinite(model.w_in).all()
        assert np.isfinite(model.w_out).all()

    def test_empty_vocab_raises(self):
        with pytest.raises(ValueError):
            train([["a"], ["b"]], TrainConfig(dim=4, min_count=5))

    def test_save_load_round_trip(self):
        corpus, a, _ = two_clique_corpus(lines=50)
        model = train(corpus, TrainConfig(dim=8, window=2, negatives=2,
                                          epochs=1, seed=0))
        buf = io.StringIO()
        model.save_text(buf)
        buf.seek(0)
        loaded = EmbeddingModel.load_text(buf)
        assert loaded.vocab.tokens == model.vocab.tokens
        assert np.allclose(loaded.vector(a[0]), model.vector(a[0]), atol=1e-6)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(dim=0)
        with pytest.raises(ValueError):
            TrainConfig(negatives=0)
