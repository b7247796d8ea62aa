"""Vocabulary artifact: pieces with log-probability scores plus marking metadata.

A vocabulary is an immutable, ordered collection of unique piece surfaces,
each carrying a natural-log probability score, together with the marking
scheme (word-initial vs word-final) and the boundary meta-symbol used when
it was trained.  The on-disk format is a small TSV with two header lines::

    #scheme: init
    #meta: 2581
    ▁the\t-3.2188758248682006
    ...

Pieces are ordered by descending score, ties broken lexicographically by
surface.  Scores round-trip exactly through save/load.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO, Union

from .errors import DataError, ParseError
from .pretokenize import PretokMode

DEFAULT_META = "▁"  # LOWER ONE EIGHTH BLOCK, the conventional boundary mark
UNK_SURFACE = "<unk>"
UNK_PENALTY = 10.0  # unknown piece scores (minimum trained score - UNK_PENALTY)


class MarkingScheme(enum.Enum):
    INIT = "init"
    FIN = "fin"

    @classmethod
    def parse(cls, label: str) -> "MarkingScheme":
        for scheme in cls:
            if scheme.value == label:
                return scheme
        raise ValueError(f"unknown marking scheme {label!r}; expected init|fin")


class PositionClass(enum.Enum):
    WORD_INITIAL = "word-initial"
    WORD_FINAL = "word-final"
    INTERNAL = "internal"


@dataclass(frozen=True)
class Piece:
    surface: str
    score: float


class Vocabulary:
    """Immutable piece inventory; safe to share across threads once built."""

    def __init__(self, pieces: Iterable[Piece], scheme: MarkingScheme,
                 meta_symbol: str = DEFAULT_META):
        pieces = tuple(pieces)
        if not pieces:
            raise DataError("empty vocabulary")
        if len(meta_symbol) != 1:
            raise DataError(f"meta symbol must be a single code point, got {meta_symbol!r}")
        seen = set()
        for piece in pieces:
            if not piece.surface:
                raise DataError("piece with empty surface")
            if piece.surface in seen:
                raise DataError(f"duplicate piece surface {piece.surface!r}")
            seen.add(piece.surface)
            if piece.surface != UNK_SURFACE and piece.score > 0.0:
                raise DataError(
                    f"piece {piece.surface!r} has positive score {piece.score}")
        self.pieces: tuple[Piece, ...] = tuple(
            sorted(pieces, key=lambda p: (-p.score, p.surface)))
        self.scheme = scheme
        self.meta_symbol = meta_symbol
        self._scores = {p.surface: p.score for p in self.pieces}

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self) -> Iterator[Piece]:
        return iter(self.pieces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._scores

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self.pieces == other.pieces and self.scheme == other.scheme
                and self.meta_symbol == other.meta_symbol)

    def score(self, surface: str) -> float:
        return self._scores[surface]

    def surfaces(self) -> tuple[str, ...]:
        return tuple(p.surface for p in self.pieces)

    def non_reserved(self) -> Iterator[Piece]:
        return (p for p in self.pieces if p.surface != UNK_SURFACE)

    @property
    def unk_score(self) -> float | None:
        return self._scores.get(UNK_SURFACE)

    def probability_mass(self) -> float:
        """Sum of exp(score) over non-reserved pieces; 1.0 after training."""
        return math.fsum(math.exp(p.score) for p in self.non_reserved())


def strip_mark(piece_surface: str, scheme: MarkingScheme,
               meta_symbol: str = DEFAULT_META) -> tuple[str, PositionClass]:
    """Remove the boundary mark from the scheme-appropriate edge, if present.

    Total function: surfaces without a mark at that edge come back unchanged
    and classed as internal.
    """
    if not piece_surface:
        raise ValueError("piece surface must be non-empty")
    if scheme is MarkingScheme.INIT:
        if piece_surface.startswith(meta_symbol):
            return piece_surface[1:], PositionClass.WORD_INITIAL
    else:
        if piece_surface.endswith(meta_symbol):
            return piece_surface[:-1], PositionClass.WORD_FINAL
    return piece_surface, PositionClass.INTERNAL


def _open_sink(destination) -> tuple[TextIO, bool]:
    if isinstance(destination, (str, Path)):
        return open(destination, "w", encoding="utf-8", newline="\n"), True
    return destination, False


def _open_source(source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    return source, False


def save_vocab(vocab: Vocabulary, destination: Union[str, Path, TextIO]) -> None:
    """Write a vocabulary as TSV; scores keep full float precision."""
    sink, owned = _open_sink(destination)
    try:
        sink.write(f"#scheme: {vocab.scheme.value}\n")
        sink.write(f"#meta: {ord(vocab.meta_symbol):04x}\n")
        for piece in vocab.pieces:
            sink.write(f"{piece.surface}\t{piece.score:.17g}\n")
    finally:
        if owned:
            sink.close()


def load_vocab(source: Union[str, Path, TextIO]) -> Vocabulary:
    """Parse a vocabulary file produced by :func:`save_vocab`."""
    handle, owned = _open_source(source)
    try:
        lines = handle.read().split("\n")
    finally:
        if owned:
            handle.close()
    if lines and lines[-1] == "":
        lines.pop()

    scheme: MarkingScheme | None = None
    meta: str | None = None
    pieces: list[Piece] = []
    surfaces_seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#scheme:"):
            try:
                scheme = MarkingScheme.parse(line.split(":", 1)[1].strip())
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            continue
        if line.startswith("#meta:"):
            payload = line.split(":", 1)[1].strip()
            try:
                meta = chr(int(payload, 16))
            except (ValueError, OverflowError):
                raise ParseError(f"bad meta code point {payload!r}", line=lineno) from None
            continue
        if line.startswith("#"):
            continue
        if "\t" not in line:
            raise ParseError(f"expected 'surface<TAB>score', got {line!r}", line=lineno)
        surface, _, score_text = line.partition("\t")
        if not surface:
            raise ParseError("empty piece surface", line=lineno)
        if surface in surfaces_seen:
            raise ParseError(f"duplicate piece surface {surface!r}", line=lineno)
        surfaces_seen.add(surface)
        try:
            score = float(score_text)
        except ValueError:
            raise ParseError(f"bad score {score_text!r}", line=lineno) from None
        if surface != UNK_SURFACE and score > 0.0:
            raise ParseError(
                f"piece {surface!r} has positive score {score}", line=lineno)
        pieces.append(Piece(surface, score))

    if scheme is None:
        raise ParseError("missing '#scheme:' header")
    if meta is None:
        raise ParseError("missing '#meta:' header")
    if not pieces:
        raise ParseError("no pieces found")
    return Vocabulary(pieces, scheme, meta)


@dataclass(frozen=True)
class TrainerConfig:
    """Knobs for vocabulary training; defaults match the standard profile."""

    target_vocab_size: int = 32000
    scheme: MarkingScheme = MarkingScheme.INIT
    pretok_mode: PretokMode = PretokMode.RAW
    shrink_factor: float = 0.75
    seed_max_size: int | None = None  # None: 100 x target, capped at 1,000,000
    seed_max_piece_len: int = 16
    em_iters_per_round: int = 2
    seed_threshold: int = 2
    meta_symbol: str = DEFAULT_META
    threads: int = 1

    def __post_init__(self):
        if self.target_vocab_size < 1:
            raise DataError("target_vocab_size must be positive")
        if not 0.0 < self.shrink_factor < 1.0:
            raise DataError("shrink_factor must lie in (0, 1)")
        if self.seed_max_size is not None and self.seed_max_size < 1:
            raise DataError("seed_max_size must be positive")
        if self.seed_max_piece_len < 1:
            raise DataError("seed_max_piece_len must be positive")
        if self.em_iters_per_round < 1:
            raise DataError("em_iters_per_round must be positive")
        if self.seed_threshold < 1:
            raise DataError("seed_threshold must be positive")
        if len(self.meta_symbol) != 1:
            raise DataError("meta_symbol must be a single code point")
        if self.threads < 1:
            raise DataError("threads must be positive")

    @property
    def effective_seed_max_size(self) -> int:
        if self.seed_max_size is not None:
            return self.seed_max_size
        return min(100 * self.target_vocab_size, 1_000_000)
