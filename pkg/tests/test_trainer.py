"""Training: seeding, EM re-estimation, pruning, the full loop."""

import math
from collections import Counter

import pytest

from boundkit import (DataError, MarkingScheme, TrainerConfig, TrainingError,
                      UNK_SURFACE, em_step, prune, seed_vocabulary, train,
                      train_detailed)
from boundkit.trainer import (_ParallelEStep, _em_pass_serial,
                              _state_from_vocab, marked_word_counts,
                              required_surfaces)
from conftest import prob_vocab
from oracles import brute_em

META = "▁"


def seed_map(candidates):
    return {c.surface: c.count for c in candidates}


class TestSeedVocabulary:
    def test_substring_enumeration_with_threshold(self):
        # counts by exhaustive enumeration: a:2 b:2 ab:2 ba:1 (excluded)
        config = TrainerConfig(target_vocab_size=100, seed_threshold=2,
                               seed_max_piece_len=3)
        seeds = seed_map(seed_vocabulary({f"{META}abab": 1}, config))
        assert seeds["a"] == 2
        assert seeds["b"] == 2
        assert seeds["ab"] == 2
        assert "ba" not in seeds
        assert "bab" not in seeds
        # required pieces ride along below the threshold
        assert seeds[META] == 1
        assert seeds[f"{META}a"] == 1

    def test_single_word_enumeration(self):
        config = TrainerConfig(target_vocab_size=100, seed_threshold=1,
                               seed_max_piece_len=16)
        seeds = seed_map(seed_vocabulary({f"{META}a": 5}, config))
        assert seeds == {f"{META}a": 5, META: 5, "a": 5}

    def test_truncation_keeps_highest_counts_plus_singles(self):
        config = TrainerConfig(target_vocab_size=100, seed_threshold=1,
                               seed_max_piece_len=4, seed_max_size=2)
        table = {f"{META}aaab": 10, f"{META}ab": 3}
        seeds = seed_map(seed_vocabulary(table, config))
        counts = Counter()
        for word, freq in table.items():
            for i in range(len(word)):
                for j in range(i + 1, min(len(word), i + 4) + 1):
                    counts[word[i:j]] += freq
        top2 = {s for s, _ in sorted(counts.items(),
                                     key=lambda kv: (-kv[1], kv[0]))[:2]}
        required = {META, "a", "b", f"{META}a"}
        assert set(seeds) == top2 | required

    def test_empty_corpus_rejected(self):
        with pytest.raises(DataError):
            seed_vocabulary({}, TrainerConfig(target_vocab_size=10))

    def test_occurrences_weighted_by_frequency(self):
        config = TrainerConfig(target_vocab_size=100, seed_threshold=1,
                               seed_max_piece_len=2)
        seeds = seed_map(seed_vocabulary({f"{META}aa": 3}, config))
        assert seeds["a"] == 6
        assert seeds["aa"] == 3


class TestRequiredSurfaces:
    def test_singles_plus_marked_pairs(self):
        table = {f"{META}cat": 2, f"{META}cab": 1}
        assert required_surfaces(table, META) == \
            {META, "c", "a", "t", "b", f"{META}c"}

    def test_unmarked_words_contribute_singles_only(self):
        assert required_surfaces({"ab": 1}, META) == {"a", "b"}


class TestEmStep:
    def test_single_path_lattice(self):
        vocab = prob_vocab({"a": 0.5, "b": 0.5})
        updated, loglik = em_step({"ab": 1}, vocab)
        assert loglik == pytest.approx(math.log(0.25), abs=1e-12)
        assert math.exp(updated.score("a")) == pytest.approx(0.5, abs=1e-12)
        assert math.exp(updated.score("b")) == pytest.approx(0.5, abs=1e-12)

    def test_two_path_enumeration_oracle(self):
        probs = {"a": 2 / 7, "ab": 3 / 7, "b": 2 / 7}
        table = {"ab": 1}
        vocab = prob_vocab(probs)
        updated, loglik = em_step(table, vocab)
        _, want_probs, want_loglik = brute_em(table, probs)
        assert loglik == pytest.approx(want_loglik, rel=1e-12)
        for surface, want in want_probs.items():
            assert math.exp(updated.score(surface)) == \
                pytest.approx(want, rel=1e-9)

    def test_probability_one_path(self):
        vocab = prob_vocab({"a": 1.0})
        updated, loglik = em_step({"a": 3}, vocab)
        assert loglik == 0.0
        assert updated.score("a") == 0.0

    def test_random_tables_match_oracle(self):
        import random
        rng = random.Random(13)
        surfaces = ["a", "b", "c", "ab", "bc", "abc"]
        for _ in range(20):
            weights = [rng.uniform(0.05, 1.0) for _ in surfaces]
            total = sum(weights)
            probs = {s: w / total for s, w in zip(surfaces, weights)}
            table = {"".join(rng.choice("abc")
                             for _ in range(rng.randint(1, 6))):
                     rng.randint(1, 5) for _ in range(rng.randint(1, 6))}
            vocab = prob_vocab(probs)
            updated, loglik = em_step(table, vocab)
            _, want_probs, want_loglik = brute_em(table, probs)
            assert loglik == pytest.approx(want_loglik, rel=1e-9)
            for surface, want in want_probs.items():
                assert math.exp(updated.score(surface)) == \
                    pytest.approx(want, rel=1e-6)

    def test_unsegmentable_word_names_it(self):
        vocab = prob_vocab({"a": 1.0})
        with pytest.raises(TrainingError, match="'ax'"):
            em_step({"ax": 1}, vocab)

    def test_probability_conservation(self):
        vocab = prob_vocab({"a": 0.25, "b": 0.25, "ab": 0.5})
        updated, _ = em_step({"ab": 2, "a": 1}, vocab)
        assert updated.probability_mass() == pytest.approx(1.0, abs=1e-9)


class TestPrune:
    def test_zero_loss_piece_goes_first(self):
        # "xy" can never appear in any segmentation of "ab"; removal loss 0
        vocab = prob_vocab({"a": 0.3, "b": 0.3, "ab": 0.3, "xy": 0.1})
        pruned = prune(vocab, {"ab": 4}, shrink_factor=0.5)
        assert "xy" not in pruned
        assert "ab" in pruned

    def test_ceil_arithmetic(self):
        # 8 prunable pieces, shrink 0.75 -> 6 survive (plus required singles)
        probs = {"a": 0.2, "b": 0.2}
        composites = ["ab", "ba", "aa", "bb", "aab", "abb", "bab", "aba"]
        for i, c in enumerate(composites):
            probs[c] = 0.6 / 8
        vocab = prob_vocab(probs)
        table = {"ab": 3, "ba": 2, "aa": 2, "bb": 1, "aab": 1, "abb": 1,
                 "bab": 1, "aba": 1}
        pruned = prune(vocab, table, shrink_factor=0.75)
        survivors = [p.surface for p in pruned.non_reserved()
                     if len(p.surface) > 1]
        assert len(survivors) == 6
        assert pruned.probability_mass() == pytest.approx(1.0, abs=1e-9)

    def test_loss_matches_from_scratch_recomputation(self):
        # removing "ab" forces [a, b]; loss = freq x (log p_ab - log pa*pb)
        probs = {"a": 0.2, "b": 0.2, "ab": 0.6}
        vocab = prob_vocab(probs)
        table = {"ab": 5}
        loss_direct = 5 * (math.log(0.6) - math.log(0.2 * 0.2))
        assert loss_direct > 0
        pruned = prune(vocab, table, shrink_factor=0.5)
        assert "ab" in pruned  # the only prunable piece; kept via ceil(0.5*1)=1

    def test_floor_size_keeps_more(self):
        probs = {"a": 0.2, "b": 0.2, "ab": 0.2, "ba": 0.2, "aa": 0.1,
                 "bb": 0.1}
        vocab = prob_vocab(probs)
        table = {"ab": 3, "ba": 3, "aa": 1, "bb": 1}
        pruned = prune(vocab, table, shrink_factor=0.25, floor_size=3)
        multi = [p.surface for p in pruned.non_reserved() if len(p.surface) > 1]
        assert len(multi) == 3


class TestTrain:
    def test_analytic_fixed_point(self):
        config = TrainerConfig(target_vocab_size=5, scheme=MarkingScheme.INIT,
                               seed_threshold=1, em_iters_per_round=30)
        result = train_detailed(["a b"] * 100, config)
        vocab = result.vocabulary
        surfaces = {p.surface for p in vocab.non_reserved()}
        assert surfaces == {f"{META}a", f"{META}b", META, "a", "b"}
        assert vocab.score(f"{META}a") == pytest.approx(math.log(0.5), abs=1e-4)
        assert vocab.score(f"{META}b") == pytest.approx(math.log(0.5), abs=1e-4)
        assert abs(vocab.probability_mass() - 1.0) <= 1e-6

    def test_fin_duality_on_single_char_words(self):
        config = TrainerConfig(target_vocab_size=5, scheme=MarkingScheme.FIN,
                               seed_threshold=1, em_iters_per_round=30)
        vocab = train(["a b"] * 100, config)
        surfaces = {p.surface for p in vocab.non_reserved()}
        assert surfaces == {f"a{META}", f"b{META}", META, "a", "b"}
        assert vocab.score(f"a{META}") == pytest.approx(math.log(0.5), abs=1e-4)

    def test_empty_corpus(self):
        with pytest.raises(DataError):
            train([], TrainerConfig(target_vocab_size=10))
        with pytest.raises(DataError):
            train(["   ", ""], TrainerConfig(target_vocab_size=10))

    def test_target_below_required_rejected(self):
        with pytest.raises(DataError, match="required"):
            train(["abcdefgh"] * 3, TrainerConfig(target_vocab_size=2))

    def test_reversal_duality_bit_exact(self, tiny_lines, tiny_fin_vocab):
        config = TrainerConfig(target_vocab_size=400,
                               scheme=MarkingScheme.INIT)
        twin = train([line[::-1] for line in tiny_lines], config)
        fin_scores = {p.surface: p.score for p in tiny_fin_vocab.non_reserved()}
        twin_scores = {p.surface[::-1]: p.score for p in twin.non_reserved()}
        assert fin_scores == twin_scores

    def test_em_monotone_within_rounds(self, tiny_lines):
        config = TrainerConfig(target_vocab_size=500, em_iters_per_round=4)
        result = train_detailed(tiny_lines, config)
        assert result.rounds
        blocks = [log.logliks for log in result.rounds]
        blocks.append(result.final_logliks)
        for logliks in blocks:
            for before, after in zip(logliks, logliks[1:]):
                assert after >= before - 1e-6 * abs(before)

    def test_mass_conserved_after_every_prune(self, tiny_lines):
        result = train_detailed(tiny_lines,
                                TrainerConfig(target_vocab_size=500))
        for log in result.rounds:
            assert abs(log.prob_mass_after_prune - 1.0) <= 1e-6
        assert abs(result.final_prob_mass - 1.0) <= 1e-6

    def test_character_coverage(self, tiny_lines, tiny_init_vocab):
        observed = set()
        for line in tiny_lines:
            for word in line.split():
                observed.update(word)
        surfaces = {p.surface for p in tiny_init_vocab.non_reserved()}
        assert observed <= surfaces

    def test_word_initial_pairs_present(self, tiny_lines, tiny_init_vocab):
        initials = {word[0] for line in tiny_lines for word in line.split()}
        surfaces = {p.surface for p in tiny_init_vocab.non_reserved()}
        assert {META + ch for ch in initials} <= surfaces

    def test_determinism(self, tiny_lines):
        config = TrainerConfig(target_vocab_size=450)
        first = train(tiny_lines, config)
        second = train(tiny_lines, config)
        assert first == second

    def test_unk_score_is_minimum_minus_penalty(self, tiny_init_vocab):
        scores = [p.score for p in tiny_init_vocab.non_reserved()]
        assert tiny_init_vocab.unk_score == pytest.approx(min(scores) - 10.0)

    def test_unreachable_target_stops_with_required_set(self):
        # prune keeps ceil(0.75 x n) pieces, which stalls once few prunable
        # pieces remain; training then stops above target and reports it
        config = TrainerConfig(target_vocab_size=7, scheme=MarkingScheme.INIT,
                               seed_threshold=1)
        result = train_detailed(["ab cd"] * 10, config)
        assert not result.reached_target
        assert len(result.vocabulary.pieces) - 1 > 7  # excluding <unk>
        surfaces = {p.surface for p in result.vocabulary.non_reserved()}
        assert {META, "a", "b", "c", "d", f"{META}a", f"{META}c"} <= surfaces


class TestParallelEStep:
    def test_sharded_pass_matches_serial(self, tiny_lines):
        config = TrainerConfig(target_vocab_size=400)
        table = marked_word_counts(tiny_lines[:100], config)
        vocab = train(tiny_lines[:100],
                      TrainerConfig(target_vocab_size=400))
        state = _state_from_vocab(table, vocab)
        serial_counts, serial_loglik = _em_pass_serial(state)
        engine = _ParallelEStep(state, threads=2)
        try:
            par_counts, par_loglik = engine.run(state)
        finally:
            engine.close()
        assert par_loglik == pytest.approx(serial_loglik, rel=1e-12)
        for a, b in zip(serial_counts, par_counts):
            assert b == pytest.approx(a, rel=1e-9, abs=1e-12)

    def test_threaded_training_is_self_deterministic(self, tiny_lines):
        config = TrainerConfig(target_vocab_size=420, threads=2)
        first = train(tiny_lines[:150], config)
        second = train(tiny_lines[:150], config)
        assert first == second
