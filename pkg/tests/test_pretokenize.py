"""Word splitting modes and their stability properties."""

import random
import unicodedata

import pytest

from boundkit import PretokMode, pretokenize


def _is_punct(ch):
    return unicodedata.category(ch).startswith("P")


class TestRaw:
    def test_whitespace_split(self):
        assert pretokenize("the cat sat.", PretokMode.RAW) == \
            ["the", "cat", "sat."]

    def test_whitespace_runs_collapse(self):
        assert pretokenize("a  b\tc", PretokMode.RAW) == ["a", "b", "c"]

    def test_empty_line(self):
        assert pretokenize("", PretokMode.RAW) == []
        assert pretokenize("   ", PretokMode.RAW) == []

    def test_non_whitespace_untouched(self):
        words = pretokenize("weirdé (tokens!) #5", PretokMode.RAW)
        assert "".join(words) == "weirdé(tokens!)#5"


class TestRuleBased:
    def test_terminal_punctuation_detached(self):
        assert pretokenize("the cat sat.", PretokMode.RULE_BASED) == \
            ["the", "cat", "sat", "."]

    def test_nested_punctuation(self):
        assert pretokenize('(hello),', PretokMode.RULE_BASED) == \
            ["(", "hello", ")", ","]

    def test_internal_punctuation_kept(self):
        assert pretokenize("don't stop well-known.", PretokMode.RULE_BASED) == \
            ["don't", "stop", "well-known", "."]

    def test_all_punctuation_word(self):
        assert pretokenize("wait ...", PretokMode.RULE_BASED) == \
            ["wait", ".", ".", "."]

    def test_edges_are_class_pure(self):
        rng = random.Random(7)
        alphabet = "ab.,!?()\"'-"
        for _ in range(300):
            line = " ".join("".join(rng.choice(alphabet)
                                    for _ in range(rng.randint(1, 8)))
                            for _ in range(rng.randint(1, 6)))
            for word in pretokenize(line, PretokMode.RULE_BASED):
                assert word
                if all(_is_punct(ch) for ch in word):
                    continue
                assert not _is_punct(word[0])
                assert not _is_punct(word[-1])


class TestExternal:
    def test_pass_through(self):
        assert pretokenize("the cat sat .", PretokMode.EXTERNAL) == \
            ["the", "cat", "sat", "."]


@pytest.mark.parametrize("mode", list(PretokMode))
class TestStability:
    """Re-splitting the space-joined output must reproduce the word list."""

    def test_round_trip_stability(self, mode):
        rng = random.Random(42)
        alphabet = "abcXYZ0123.,!?()'é▁"
        for _ in range(500):
            line = " ".join("".join(rng.choice(alphabet)
                                    for _ in range(rng.randint(1, 10)))
                            for _ in range(rng.randint(0, 8)))
            words = pretokenize(line, mode)
            assert all(words), "no output word may be empty"
            rejoined = " ".join(words)
            assert pretokenize(rejoined, PretokMode.RAW) == words

    def test_idempotent(self, mode):
        line = "A sentence, with (some) punctuation marks!"
        words = pretokenize(line, mode)
        again = pretokenize(" ".join(words), mode)
        if mode is PretokMode.RULE_BASED:
            # rule splitting is already applied; a second pass is a no-op
            assert again == words
        else:
            assert again == words


def test_parse_labels():
    assert PretokMode.parse("raw") is PretokMode.RAW
    assert PretokMode.parse("rules") is PretokMode.RULE_BASED
    assert PretokMode.parse("external") is PretokMode.EXTERNAL
    with pytest.raises(ValueError):
        PretokMode.parse("stanford")
