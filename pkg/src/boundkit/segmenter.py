"""Word segmentation: marking, lattices, Viterbi decoding, encode/decode.

Words are marked with the vocabulary's meta-symbol on the scheme side
(prepended for word-initial marking, appended for word-final).  The
word-final scheme is driven entirely by reversal: the marked word is
code-point-reversed, decoded against an index of reversed piece surfaces,
and the resulting pieces are flipped back, so a final-marking model behaves
exactly like an initial-marking model over mirrored text.

Decoding selects the best path through the word's match lattice: highest
total score; among exact score ties, fewest pieces, then lexicographically
smallest piece sequence (for the reversal-driven scheme the tie rule applies
in the reversed domain).

Literal occurrences of the meta-symbol in input text are escaped to a
private-use code point before marking and restored on decode; inputs
containing U+F8FF itself are not supported.
"""

from __future__ import annotations

from array import array
from collections import OrderedDict

from .errors import DataError
from .pretokenize import PretokMode, pretokenize
from .vocab import MarkingScheme, UNK_SURFACE, Vocabulary
from . import kernels

ESCAPE_CHAR = ""

_CACHE_SIZE = 1 << 18


def escape_meta(text: str, meta_symbol: str) -> str:
    return text.replace(meta_symbol, ESCAPE_CHAR)


def unescape_meta(text: str, meta_symbol: str) -> str:
    return text.replace(ESCAPE_CHAR, meta_symbol)


def mark_word(word: str, scheme: MarkingScheme, meta_symbol: str) -> str:
    """Attach the boundary mark: prepended for INIT, appended for FIN."""
    if not word:
        raise ValueError("cannot mark an empty word")
    if scheme is MarkingScheme.INIT:
        return meta_symbol + word
    return word + meta_symbol


class PieceMatcher:
    """Prefix-trie matcher over a fixed piece inventory.

    Piece ids are assigned in lexicographic surface order so they double as
    tie-breaking ranks in the DP kernels.  ``unk_pid`` (when not None) backs
    single-character fallback edges for uncovered code points.
    """

    def __init__(self, surfaces: list[str], scores: list[float],
                 unk_pid: int | None = None):
        if sorted(surfaces) != list(surfaces):
            raise ValueError("matcher surfaces must be lexicographically sorted")
        self.surfaces = list(surfaces)
        self.scores = array("d", scores)
        self.unk_pid = -1 if unk_pid is None else unk_pid
        self.max_len = 0
        root: dict = {}
        for pid, surface in enumerate(self.surfaces):
            if pid == unk_pid:
                continue  # the reserved piece never matches text directly
            node = root
            for ch in surface:
                node = node.setdefault(ch, {})
            node[""] = pid
            if len(surface) > self.max_len:
                self.max_len = len(surface)
        self.root = root

    def lattice_arrays(self, word: str):
        """CSR edge arrays for ``word``; see ``kernels`` for the layout."""
        n = len(word)
        by_end: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        by_start: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
        root = self.root
        for s in range(n):
            covered = False
            node = root
            limit = min(n, s + self.max_len)
            for j in range(s, limit):
                node = node.get(word[j])
                if node is None:
                    break
                pid = node.get("")
                if pid is not None:
                    by_end[j + 1].append((s, pid))
                    by_start[s].append((j + 1, pid))
                    if j == s:
                        covered = True
            if not covered and self.unk_pid >= 0:
                by_end[s + 1].append((s, self.unk_pid))
                by_start[s].append((s + 1, self.unk_pid))

        end_off = array("q", [0] * (n + 2))
        e_start = array("q")
        e_pid = array("q")
        for e in range(n + 1):
            end_off[e + 1] = end_off[e] + len(by_end[e])
            for s, pid in by_end[e]:
                e_start.append(s)
                e_pid.append(pid)
        st_off = array("q", [0] * (n + 2))
        s_end = array("q")
        s_pid = array("q")
        for s in range(n + 1):
            st_off[s + 1] = st_off[s] + len(by_start[s])
            for e, pid in by_start[s]:
                s_end.append(e)
                s_pid.append(pid)
        return n, end_off, e_start, e_pid, st_off, s_end, s_pid

    def viterbi(self, word: str, banned_pid: int = -1):
        n, end_off, e_start, e_pid, _, _, _ = self.lattice_arrays(word)
        return kernels.viterbi_path(n, end_off, e_start, e_pid, self.scores,
                                    banned_pid)


class Lattice:
    """Per-word DAG of vocabulary matches over code-point positions."""

    def __init__(self, word: str, matcher: PieceMatcher):
        self.word = word
        self.matcher = matcher
        (self.n, self.end_off, self.e_start, self.e_pid,
         self.st_off, self.s_end, self.s_pid) = matcher.lattice_arrays(word)

    def edges(self) -> list[tuple[int, int, str, float]]:
        """All edges as (start, end, surface, score) tuples."""
        out = []
        for e in range(1, self.n + 1):
            for k in range(self.end_off[e], self.end_off[e + 1]):
                pid = self.e_pid[k]
                out.append((self.e_start[k], e, self.matcher.surfaces[pid],
                            self.matcher.scores[pid]))
        return out

    def has_full_path(self) -> bool:
        return kernels.viterbi_path(self.n, self.end_off, self.e_start,
                                    self.e_pid, self.matcher.scores) is not None


def _forward_matcher(vocab: Vocabulary) -> PieceMatcher:
    surfaces = sorted(vocab.surfaces())
    scores = [vocab.score(s) for s in surfaces]
    unk_pid = surfaces.index(UNK_SURFACE) if UNK_SURFACE in vocab else None
    return PieceMatcher(surfaces, scores, unk_pid)


def build_lattice(marked_word: str, vocab: Vocabulary) -> Lattice:
    """Lattice of all vocabulary matches in ``marked_word`` (forward surfaces)."""
    return Lattice(marked_word, _forward_matcher(vocab))


def viterbi_full(lattice: Lattice) -> tuple[list[str], float]:
    """Best segmentation and its exact total score."""
    result = kernels.viterbi_path(lattice.n, lattice.end_off, lattice.e_start,
                                  lattice.e_pid, lattice.matcher.scores)
    if result is None:
        raise DataError(f"no full segmentation path for {lattice.word!r}")
    pids, score = result
    return [lattice.matcher.surfaces[pid] for pid in pids], score


def viterbi(lattice: Lattice) -> list[str]:
    """Most probable segmentation of the lattice's word."""
    return viterbi_full(lattice)[0]


class Segmenter:
    """Encodes text against one immutable vocabulary.

    Per-word segmentations are memoized in a bounded LRU keyed by the raw
    word; the cache is private to the instance, so concurrent use should
    either share one segmenter per thread or accept benign recomputation.
    """

    def __init__(self, vocab: Vocabulary, cache_size: int = _CACHE_SIZE):
        self.vocab = vocab
        self.scheme = vocab.scheme
        self.meta = vocab.meta_symbol
        forward = vocab.surfaces()
        if self.scheme is MarkingScheme.FIN:
            match = [s if s == UNK_SURFACE else s[::-1] for s in forward]
        else:
            match = list(forward)
        order = sorted(range(len(forward)), key=lambda i: match[i])
        self._out_surfaces = [forward[i] for i in order]
        match_sorted = [match[i] for i in order]
        scores = [vocab.score(forward[i]) for i in order]
        unk_pid = None
        if UNK_SURFACE in vocab:
            unk_pid = match_sorted.index(UNK_SURFACE)
        self.matcher = PieceMatcher(match_sorted, scores, unk_pid)
        self._cache: OrderedDict[str, tuple[tuple[str, ...], float]] = OrderedDict()
        self._cache_size = cache_size

    def _segment(self, word: str) -> tuple[tuple[str, ...], float]:
        hit = self._cache.get(word)
        if hit is not None:
            self._cache.move_to_end(word)
            return hit
        escaped = escape_meta(word, self.meta)
        if self.scheme is MarkingScheme.INIT:
            marked = self.meta + escaped
        else:
            marked = self.meta + escaped[::-1]
        result = self.matcher.viterbi(marked)
        if result is None:
            raise DataError(
                f"word {word!r} is not segmentable (vocabulary lacks coverage "
                f"and has no {UNK_SURFACE} piece)")
        pids, score = result
        if self.scheme is MarkingScheme.FIN:
            pids = pids[::-1]
        pieces = tuple(self._out_surfaces[pid] for pid in pids)
        if len(self._cache) >= self._cache_size:
            self._cache.popitem(last=False)
        self._cache[word] = (pieces, score)
        return pieces, score

    def encode_word(self, word: str) -> list[str]:
        return list(self._segment(word)[0])

    def encode_word_with_score(self, word: str) -> tuple[list[str], float]:
        pieces, score = self._segment(word)
        return list(pieces), score

    def encode_line(self, line: str, pretok: PretokMode = PretokMode.RAW) -> list[str]:
        pieces: list[str] = []
        for word in pretokenize(line, pretok):
            pieces.extend(self._segment(word)[0])
        return pieces


def encode_line(line: str, vocab: Vocabulary,
                pretok: PretokMode = PretokMode.RAW) -> list[str]:
    """One-shot convenience wrapper; build a :class:`Segmenter` for bulk work."""
    return Segmenter(vocab).encode_line(line, pretok)


def decode(pieces: list[str], scheme: MarkingScheme, meta_symbol: str) -> str:
    """Inverse of encoding up to whitespace normalization: marks become the
    single spaces between words."""
    if not pieces:
        return ""
    words: list[str] = []
    current: list[str] = []
    if scheme is MarkingScheme.INIT:
        for piece in pieces:
            if piece.startswith(meta_symbol):
                if current:
                    words.append("".join(current))
                current = [piece[1:]]
            else:
                current.append(piece)
        if current:
            words.append("".join(current))
    else:
        for piece in pieces:
            if piece.endswith(meta_symbol):
                current.append(piece[:-1])
                words.append("".join(current))
                current = []
            else:
                current.append(piece)
        if current:
            words.append("".join(current))
    return " ".join(unescape_meta(w, meta_symbol) for w in words if w)
