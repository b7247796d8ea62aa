"""Add-epsilon-smoothed bigram language model over piece sequences.

Every sentence line is framed with begin/end symbols; the model's type
inventory is fixed at fit time as the observed piece types plus the two
framing symbols plus a single unknown type that absorbs anything unseen at
evaluation time.  Perplexity is base-2 per predicted token (the end symbol
is predicted, the begin symbol is not), accumulated with compensated
summation so long corpora do not drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError

BOS = "<s>"
EOS = "</s>"
UNK2 = "<unk2>"

DEFAULT_EPSILON = 0.005


@dataclass
class BigramModel:
    unigram_counts: dict[str, int]  # counts of tokens in predictor position
    bigram_counts: dict[tuple[str, str], int]
    vocab_size: int  # observed types + BOS + EOS + UNK2
    epsilon: float
    observed: frozenset[str]

    def all_types(self) -> list[str]:
        return sorted(self.observed) + [BOS, EOS, UNK2]

    def conditional(self, prev: str, token: str) -> float:
        """Smoothed p(token | prev); tokens must already be mapped in-model."""
        num = self.bigram_counts.get((prev, token), 0) + self.epsilon
        den = (self.unigram_counts.get(prev, 0)
               + self.epsilon * self.vocab_size)
        return num / den

    def map_token(self, token: str) -> str:
        return token if token in self.observed else UNK2


def fit(tokenized_corpus: Iterable[Sequence[str]],
        epsilon: float = DEFAULT_EPSILON) -> BigramModel:
    """Count framed bigrams over the corpus of per-line piece sequences."""
    if epsilon <= 0:
        raise DataError("epsilon must be positive")
    unigram: dict[str, int] = {}
    bigram: dict[tuple[str, str], int] = {}
    observed: set[str] = set()
    n_lines = 0
    for tokens in tokenized_corpus:
        n_lines += 1
        observed.update(tokens)
        prev = BOS
        for token in list(tokens) + [EOS]:
            unigram[prev] = unigram.get(prev, 0) + 1
            key = (prev, token)
            bigram[key] = bigram.get(key, 0) + 1
            prev = token
    if n_lines == 0:
        raise DataError("empty corpus: no lines to fit the bigram model on")
    return BigramModel(
        unigram_counts=unigram,
        bigram_counts=bigram,
        vocab_size=len(observed) + 3,
        epsilon=epsilon,
        observed=frozenset(observed),
    )


def perplexity(model: BigramModel,
               tokenized_corpus: Iterable[Sequence[str]]) -> float:
    """Base-2 perplexity per predicted token (end symbol included)."""
    log_terms: list[float] = []
    n_predicted = 0
    n_lines = 0
    for tokens in tokenized_corpus:
        n_lines += 1
        prev = BOS
        for token in list(tokens) + [EOS]:
            mapped = token if token == EOS else model.map_token(token)
            log_terms.append(math.log2(model.conditional(prev, mapped)))
            n_predicted += 1
            prev = mapped
    if n_lines == 0 or n_predicted == 0:
        raise DataError("empty corpus: nothing to evaluate perplexity on")
    return 2.0 ** (-math.fsum(log_terms) / n_predicted)


def uniform_perplexity(model: BigramModel) -> float:
    """Perplexity of the epsilon-only model with the same type inventory."""
    return float(model.vocab_size)
