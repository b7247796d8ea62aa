"""Morpheme recovery: gold lexicon matching, agreement, score regression.

A lexicon entry is recovered by a vocabulary when some piece, after boundary
-mark stripping, equals the entry string.  Matching is on string identity and
deliberately ignores boundness (a suffix-bound entry may match a word-initial
piece); position classes are carried alongside for the exclusive-match
analysis.  Matching is case-sensitive unless ``fold_case`` is set.

When several pieces of one vocabulary share a bare string (marked and
unmarked variants), the record keeps the highest score, i.e. the most
probable variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, TextIO, Union

import numpy as np
from scipy import stats as _scipy_stats

from .errors import DataError
from .vocab import MarkingScheme, Vocabulary, strip_mark

_DEGENERATE_RSS = 1e-12


@dataclass(frozen=True)
class MorphLexicon:
    """Normalized gold morpheme strings with boundness bookkeeping."""

    entries: frozenset[str]
    prefix_bound: frozenset[str]  # written with a trailing hyphen: "co-"
    suffix_bound: frozenset[str]  # written with a leading hyphen: "-ing"
    free: frozenset[str]

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(source: Union[str, Path, TextIO],
                 fold_case: bool = False) -> MorphLexicon:
    """One morpheme per line; leading/trailing hyphens mark bound forms."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    else:
        lines = source.read().splitlines()
    entries: set[str] = set()
    prefix_bound: set[str] = set()
    suffix_bound: set[str] = set()
    free: set[str] = set()
    for raw in lines:
        form = raw.strip()
        if not form or form.startswith("#"):
            continue
        is_suffix = form.startswith("-")
        is_prefix = form.endswith("-")
        bare = form.strip("-")
        if not bare:
            continue
        if fold_case:
            bare = bare.casefold()
        entries.add(bare)
        if is_suffix:
            suffix_bound.add(bare)
        elif is_prefix:
            prefix_bound.add(bare)
        else:
            free.add(bare)
    if not entries:
        raise DataError("empty lexicon: no morpheme entries found")
    return MorphLexicon(frozenset(entries), frozenset(prefix_bound),
                        frozenset(suffix_bound), frozenset(free))


def bare_pieces(vocab: Vocabulary, fold_case: bool = False
                ) -> dict[str, dict]:
    """Map bare string -> {score: best score, classes: position classes}.

    Empty bare strings (the pure mark piece) are skipped.
    """
    table: dict[str, dict] = {}
    for piece in vocab.non_reserved():
        bare, position = strip_mark(piece.surface, vocab.scheme,
                                    vocab.meta_symbol)
        if not bare:
            continue
        if fold_case:
            bare = bare.casefold()
        slot = table.get(bare)
        if slot is None:
            table[bare] = {"score": piece.score, "classes": {position}}
        else:
            slot["classes"].add(position)
            if piece.score > slot["score"]:
                slot["score"] = piece.score
    return table


class CoverageResult(NamedTuple):
    matched: frozenset[str]
    count: int
    fraction: float


def coverage(vocab: Vocabulary, lexicon: MorphLexicon,
             fold_case: bool = False) -> CoverageResult:
    """Lexicon entries that appear, mark-stripped, as vocabulary pieces."""
    bares = bare_pieces(vocab, fold_case)
    matched = frozenset(entry for entry in lexicon.entries if entry in bares)
    return CoverageResult(matched, len(matched),
                          len(matched) / len(lexicon.entries))


def union_coverage(vocab_a: Vocabulary, vocab_b: Vocabulary,
                   lexicon: MorphLexicon, fold_case: bool = False) -> int:
    matched_a = coverage(vocab_a, lexicon, fold_case).matched
    matched_b = coverage(vocab_b, lexicon, fold_case).matched
    return len(matched_a | matched_b)


class ExclusiveMatches(NamedTuple):
    only_a: dict[str, tuple[str, ...]]
    only_b: dict[str, tuple[str, ...]]


def exclusive_matches(vocab_a: Vocabulary, vocab_b: Vocabulary,
                      lexicon: MorphLexicon,
                      fold_case: bool = False) -> ExclusiveMatches:
    """Entries recovered by exactly one vocabulary, annotated with the
    position classes of the matching pieces."""
    bares_a = bare_pieces(vocab_a, fold_case)
    bares_b = bare_pieces(vocab_b, fold_case)
    matched_a = {e for e in lexicon.entries if e in bares_a}
    matched_b = {e for e in lexicon.entries if e in bares_b}

    def annotate(entries: set[str], bares: dict) -> dict[str, tuple[str, ...]]:
        return {entry: tuple(sorted(c.value for c in bares[entry]["classes"]))
                for entry in sorted(entries)}

    return ExclusiveMatches(annotate(matched_a - matched_b, bares_a),
                            annotate(matched_b - matched_a, bares_b))


@dataclass(frozen=True)
class AgreementRecord:
    bare_piece: str
    score_init: Optional[float]
    score_fin: Optional[float]
    agreement: int  # 0, 1, or 2 vocabularies recover this string as a morpheme
    is_morpheme: bool


def build_agreement_table(vocab_init: Vocabulary, vocab_fin: Vocabulary,
                          lexicon: MorphLexicon,
                          fold_case: bool = False) -> list[AgreementRecord]:
    """One record per distinct bare piece string present in either vocabulary."""
    if vocab_init.scheme is not MarkingScheme.INIT:
        raise DataError("first vocabulary must use the init marking scheme")
    if vocab_fin.scheme is not MarkingScheme.FIN:
        raise DataError("second vocabulary must use the fin marking scheme")
    bares_init = bare_pieces(vocab_init, fold_case)
    bares_fin = bare_pieces(vocab_fin, fold_case)
    records = []
    for bare in sorted(set(bares_init) | set(bares_fin)):
        is_morpheme = bare in lexicon.entries
        in_init = bare in bares_init
        in_fin = bare in bares_fin
        agreement = int(is_morpheme and in_init) + int(is_morpheme and in_fin)
        records.append(AgreementRecord(
            bare_piece=bare,
            score_init=bares_init[bare]["score"] if in_init else None,
            score_fin=bares_fin[bare]["score"] if in_fin else None,
            agreement=agreement,
            is_morpheme=is_morpheme,
        ))
    return records


@dataclass
class RegressionResult:
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    t_stats: dict[str, float]
    p_values: dict[str, float]
    n: int
    df: int
    group_means: dict[int, float]
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficients,
            "std_errors": self.std_errors,
            "t_stats": self.t_stats,
            "p_values": self.p_values,
            "n": self.n,
            "df": self.df,
            "group_means": {str(k): v for k, v in self.group_means.items()},
            "degenerate": self.degenerate,
        }


def linear_regression(y: Sequence[float], columns: Sequence[Sequence[float]],
                      names: Sequence[str]) -> RegressionResult:
    """OLS with intercept: y ~ 1 + columns.  Two-sided t-test p-values."""
    y_arr = np.asarray(y, dtype=np.float64)
    n = y_arr.shape[0]
    design = np.column_stack([np.ones(n)] + [np.asarray(c, dtype=np.float64)
                                             for c in columns])
    names = ["intercept"] + list(names)
    k = design.shape[1]
    if n <= k:
        raise DataError(f"need more than {k} observations to fit {k} "
                        f"coefficients, got {n}")
    rank = np.linalg.matrix_rank(design)
    if rank < k:
        for j in range(1, k):
            reduced = np.delete(design, j, axis=1)
            if np.linalg.matrix_rank(reduced) == rank:
                raise DataError(
                    f"design matrix is rank-deficient: predictor "
                    f"{names[j]!r} is collinear with the others")
        raise DataError("design matrix is rank-deficient")

    beta, _, _, _ = np.linalg.lstsq(design, y_arr, rcond=None)
    residuals = y_arr - design @ beta
    rss = float(residuals @ residuals)
    df = n - k
    degenerate = rss <= _DEGENERATE_RSS * max(1.0, float(y_arr @ y_arr))
    sigma2 = rss / df
    xtx_inv = np.linalg.inv(design.T @ design)
    ses = np.sqrt(np.maximum(sigma2 * np.diag(xtx_inv), 0.0))

    coefficients = {}
    std_errors = {}
    t_stats = {}
    p_values = {}
    for name, b, se in zip(names, beta, ses):
        coefficients[name] = float(b)
        std_errors[name] = float(se)
        if se > 0.0:
            t = float(b / se)
            p = float(2.0 * _scipy_stats.t.sf(abs(t), df))
        elif b == 0.0:
            t, p = 0.0, 1.0
        else:
            t, p = math.copysign(math.inf, b), 0.0
        t_stats[name] = t
        p_values[name] = p
    return RegressionResult(coefficients, std_errors, t_stats, p_values,
                            n=n, df=df, group_means={}, degenerate=degenerate)


def _long_rows(records: Iterable[AgreementRecord]
               ) -> tuple[list[float], list[float], list[float]]:
    """(score, agreement, model indicator) rows; one per observed score."""
    ys: list[float] = []
    agreements: list[float] = []
    models: list[float] = []
    for record in records:
        for model_flag, score in ((0.0, record.score_init),
                                  (1.0, record.score_fin)):
            if score is None:
                continue
            ys.append(score)
            agreements.append(float(record.agreement))
            models.append(model_flag)
    return ys, agreements, models


def ols(records: Sequence[AgreementRecord]) -> RegressionResult:
    """Regress piece log-probabilities on agreement and model identity,
    pooling both models' observations in long format."""
    ys, agreements, models = _long_rows(records)
    result = linear_regression(ys, [agreements, models],
                               ["agreement", "model"])
    by_level: dict[int, list[float]] = {}
    for y, a in zip(ys, agreements):
        by_level.setdefault(int(a), []).append(y)
    result.group_means = {level: math.fsum(values) / len(values)
                          for level, values in sorted(by_level.items())}
    return result


def export_score_distributions(records: Iterable[AgreementRecord],
                               destination: Union[str, Path, TextIO]) -> None:
    """Long-format TSV for external plotting of score distributions."""
    if isinstance(destination, (str, Path)):
        handle = open(destination, "w", encoding="utf-8", newline="\n")
        owned = True
    else:
        handle, owned = destination, False
    try:
        handle.write("bare_piece\tmodel\tscore\tagreement\tis_morpheme\n")
        for record in records:
            for model, score in (("init", record.score_init),
                                 ("fin", record.score_fin)):
                if score is None:
                    continue
                handle.write(f"{record.bare_piece}\t{model}\t{score:.17g}\t"
                             f"{record.agreement}\t"
                             f"{str(record.is_morpheme).lower()}\n")
    finally:
        if owned:
            handle.close()
