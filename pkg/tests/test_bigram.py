"""Add-epsilon bigram model: counting, smoothing, perplexity."""

import math
import random

import pytest

from boundkit import DataError
from boundkit.bigram import (BOS, EOS, UNK2, BigramModel, fit, perplexity,
                             uniform_perplexity)


class TestFit:
    def test_single_line_counts(self):
        model = fit([["a", "b"]])
        assert model.bigram_counts == {(BOS, "a"): 1, ("a", "b"): 1,
                                       ("b", EOS): 1}
        assert model.unigram_counts == {BOS: 1, "a": 1, "b": 1}
        assert model.vocab_size == 2 + 3

    def test_repeated_lines(self):
        model = fit([["a"], ["a"]])
        assert model.bigram_counts[(BOS, "a")] == 2
        assert model.bigram_counts[("a", EOS)] == 2

    def test_successor_sums_equal_context_counts(self):
        rng = random.Random(99)
        lines = [[rng.choice("abcde") for _ in range(rng.randint(0, 7))]
                 for _ in range(60)]
        model = fit(lines)
        for context, total in model.unigram_counts.items():
            successor_sum = sum(c for (p, _), c in model.bigram_counts.items()
                                if p == context)
            assert successor_sum == total

    def test_empty_corpus_rejected(self):
        with pytest.raises(DataError):
            fit([])

    def test_epsilon_must_be_positive(self):
        with pytest.raises(DataError):
            fit([["a"]], epsilon=0.0)


class TestConditional:
    def test_normalization_over_full_inventory(self):
        lines = [["a", "b", "c"], ["b", "c", "a"], ["c"], ["a", "a"]]
        model = fit(lines, epsilon=0.005)
        types = model.all_types()
        assert len(types) == model.vocab_size
        for context in types:
            total = math.fsum(model.conditional(context, t) for t in types)
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_monotone_toward_uniform_as_epsilon_grows(self):
        lines = [["a", "a", "b"]]
        seen, unseen = ("a", "a"), ("a", "b")
        previous_gap = None
        for epsilon in (0.001, 0.01, 0.1, 1.0, 10.0, 1000.0):
            model = fit(lines, epsilon=epsilon)
            v = model.vocab_size
            p_seen = model.conditional(*seen)
            p_unseen = model.conditional(*unseen)
            gap = abs(p_seen - 1.0 / v) + abs(p_unseen - 1.0 / v)
            if previous_gap is not None:
                assert gap <= previous_gap + 1e-15
            previous_gap = gap

    def test_unseen_context_is_uniform(self):
        model = fit([["a"]], epsilon=0.005)
        v = model.vocab_size
        assert model.conditional("zzz", "a") == pytest.approx(1.0 / v)


class TestPerplexity:
    def test_deterministic_corpus_approaches_one(self):
        model = fit([["a"]] * 100, epsilon=1e-9)
        assert perplexity(model, [["a"]]) <= 1.001

    def test_all_unseen_contexts_approach_type_count(self):
        model = fit([["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]],
                    epsilon=0.005)
        v = model.vocab_size
        eval_line = [f"novel{i}" for i in range(400)]
        ppl = perplexity(model, [eval_line])
        assert abs(ppl - v) / v <= 0.01

    def test_training_beats_uniform(self):
        rng = random.Random(5)
        lines = [[rng.choice("abcd") for _ in range(rng.randint(1, 9))]
                 for _ in range(200)]
        model = fit(lines)
        assert perplexity(model, lines) < uniform_perplexity(model)

    def test_unknown_tokens_map_to_unk2(self):
        model = fit([["a", "b"]])
        # both evaluations see the same mapped sequence
        assert perplexity(model, [["q"]]) == perplexity(model, [[UNK2]])

    def test_empty_eval_rejected(self):
        model = fit([["a"]])
        with pytest.raises(DataError):
            perplexity(model, [])

    def test_deterministic(self):
        rng = random.Random(17)
        lines = [[rng.choice("abcdef") for _ in range(rng.randint(0, 10))]
                 for _ in range(100)]
        model_a = fit(lines)
        model_b = fit(lines)
        assert perplexity(model_a, lines) == perplexity(model_b, lines)

    def test_end_symbol_predicted_begin_not(self):
        # one line, one token: exactly two predictions (token, end)
        model = fit([["a"], ["a"]], epsilon=0.5)
        v = model.vocab_size
        p_a = (2 + 0.5) / (2 + 0.5 * v)
        p_end = (2 + 0.5) / (2 + 0.5 * v)
        want = 2.0 ** (-(math.log2(p_a) + math.log2(p_end)) / 2)
        assert perplexity(model, [["a"]]) == pytest.approx(want, rel=1e-12)
