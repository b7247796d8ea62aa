"""Surface statistics: token ratios, entropies, piece-length histograms.

Entropies are reported in bits.  Piece scores are stored as natural logs, so
type-level entropy converts at computation time; the log base is echoed into
report metadata because it is a reporting convention, not a model property.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DataError
from .pretokenize import PretokMode, pretokenize
from .segmenter import Segmenter
from .vocab import Vocabulary, strip_mark

_LN2 = math.log(2.0)


@dataclass
class TokenCounts:
    """Piece-type frequency table over some encoded corpus."""

    counts: dict[str, int] = field(default_factory=dict)
    total: int = 0

    @classmethod
    def from_pieces(cls, pieces: Iterable[str]) -> "TokenCounts":
        counter = Counter(pieces)
        return cls(dict(counter), sum(counter.values()))

    def update(self, pieces: Iterable[str]) -> None:
        for piece in pieces:
            self.counts[piece] = self.counts.get(piece, 0) + 1
            self.total += 1


@dataclass
class StatsReport:
    """One (model, corpus) cell of the corpus-measures table."""

    model_id: str
    corpus_id: str
    tokens_per_word: float
    corpus_entropy_bits: float
    type_entropy_bits: float
    perplexity: Optional[float] = None
    piece_count: int = 0
    word_count: int = 0

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "corpus_id": self.corpus_id,
            "tokens_per_word": self.tokens_per_word,
            "corpus_entropy_bits": self.corpus_entropy_bits,
            "type_entropy_bits": self.type_entropy_bits,
            "perplexity": self.perplexity,
            "piece_count": self.piece_count,
            "word_count": self.word_count,
        }


def token_ratio(piece_count: int, word_count: int) -> float:
    """Pieces emitted per word consumed; the compression measure."""
    if word_count <= 0:
        raise DataError("word count must be positive")
    return piece_count / word_count


def corpus_entropy(counts: TokenCounts) -> float:
    """Shannon entropy (bits) of the piece-type distribution."""
    if counts.total <= 0 or not counts.counts:
        raise DataError("cannot take entropy of an empty token count table")
    total = counts.total
    terms = []
    for surface in sorted(counts.counts):
        c = counts.counts[surface]
        if c == 0:
            continue
        p = c / total
        terms.append(-p * math.log2(p))
    return math.fsum(terms)


def type_entropy(vocab: Vocabulary) -> float:
    """Entropy (bits) of the model's own piece distribution."""
    terms = []
    for piece in vocab.non_reserved():
        if math.isinf(piece.score):
            continue  # zero-probability piece contributes nothing
        p = math.exp(piece.score)
        terms.append(-p * (piece.score / _LN2))
    return math.fsum(terms)


@dataclass
class LengthHistogram:
    """Piece lengths in code points, boundary mark excluded."""

    histogram: dict[int, int]
    mean_length: Optional[float]

    def to_dict(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "mean_length": self.mean_length,
        }


def length_histogram(vocab: Vocabulary) -> LengthHistogram:
    histogram: Counter = Counter()
    for piece in vocab.non_reserved():
        bare, _ = strip_mark(piece.surface, vocab.scheme, vocab.meta_symbol)
        histogram[len(bare)] += 1
    total = sum(histogram.values())
    if total == 0:
        return LengthHistogram({}, None)
    mean = sum(length * count for length, count in histogram.items()) / total
    return LengthHistogram(dict(histogram), mean)


def encode_corpus(segmenter: Segmenter, lines: Iterable[str],
                  pretok: PretokMode) -> tuple[TokenCounts, int, list[list[str]]]:
    """Encode a corpus: returns (piece counts, word count, per-line pieces).

    The word count follows the denominator the tokenizer consumed: raw
    whitespace words for RAW mode, pretokenized words otherwise.
    """
    counts = TokenCounts()
    word_count = 0
    token_lines: list[list[str]] = []
    for line in lines:
        words = pretokenize(line, pretok)
        word_count += len(words)
        pieces: list[str] = []
        for word in words:
            pieces.extend(segmenter.encode_word(word))
        counts.update(pieces)
        token_lines.append(pieces)
    return counts, word_count, token_lines


def stats_report(model_id: str, corpus_id: str, vocab: Vocabulary,
                 counts: TokenCounts, word_count: int,
                 perplexity: Optional[float] = None) -> StatsReport:
    return StatsReport(
        model_id=model_id,
        corpus_id=corpus_id,
        tokens_per_word=token_ratio(counts.total, word_count),
        corpus_entropy_bits=corpus_entropy(counts),
        type_entropy_bits=type_entropy(vocab),
        perplexity=perplexity,
        piece_count=counts.total,
        word_count=word_count,
    )
