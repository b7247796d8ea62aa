"""Unigram LM vocabulary training: seeding, EM re-estimation, pruning.

The pipeline: pretokenize each line, escape literal meta-symbols, apply the
boundary mark (the word-final scheme trains on reversed words and flips the
learned surfaces at the end), build a word-frequency table, extract frequent
substrings as seed pieces, then alternate EM score re-estimation with
likelihood-loss pruning until the vocabulary fits the target size.

All iteration orders are sorted, so a given corpus and config reproduce the
same vocabulary bit-for-bit in the default single-threaded mode.
"""

from __future__ import annotations

import logging
import math
from array import array
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import kernels
from .errors import DataError, TrainingError
from .pretokenize import pretokenize
from .segmenter import PieceMatcher, escape_meta
from .vocab import (MarkingScheme, Piece, TrainerConfig, UNK_PENALTY,
                    UNK_SURFACE, Vocabulary)

logger = logging.getLogger(__name__)

_PROB_FLOOR = 1e-100  # keeps scores finite when expected counts underflow


@dataclass(frozen=True)
class SeedCandidate:
    surface: str
    count: int


@dataclass
class RoundLog:
    """Diagnostics for one EM+prune round."""

    round_index: int
    logliks: list[float] = field(default_factory=list)
    size_before: int = 0
    size_after: int = 0
    prob_mass_after_prune: float | None = None


@dataclass
class TrainResult:
    vocabulary: Vocabulary
    rounds: list[RoundLog]
    final_logliks: list[float]
    final_prob_mass: float
    seed_size: int
    required_count: int
    reached_target: bool
    distinct_words: int
    total_words: int


def marked_word_counts(corpus_lines: Iterable[str],
                       config: TrainerConfig) -> Counter:
    """Word-frequency table in match space: escaped, reversed for the
    word-final scheme, and prefixed with the meta-symbol."""
    meta = config.meta_symbol
    reverse = config.scheme is MarkingScheme.FIN
    counts: Counter = Counter()
    for line in corpus_lines:
        for word in pretokenize(line, config.pretok_mode):
            escaped = escape_meta(word, meta)
            if reverse:
                escaped = escaped[::-1]
            counts[meta + escaped] += 1
    return counts


def _overlapping_count(word_counts: Mapping[str, int], surface: str) -> int:
    total = 0
    for word, freq in word_counts.items():
        start = word.find(surface)
        while start >= 0:
            total += freq
            start = word.find(surface, start + 1)
    return total


def required_surfaces(word_counts: Mapping[str, int],
                      meta_symbol: str) -> set[str]:
    """Unprunable pieces: every observed code point, plus the marked
    two-point piece for each code point seen adjacent to the mark."""
    required: set[str] = set()
    for word in word_counts:
        required.update(word)
        if len(word) >= 2 and word[0] == meta_symbol:
            required.add(word[:2])
    return required


def seed_vocabulary(word_counts: Mapping[str, int],
                    config: TrainerConfig) -> list[SeedCandidate]:
    """All substrings above the frequency threshold, truncated to the
    highest-count ``seed_max_size`` candidates; required pieces always ride
    along.  Occurrences are counted per position, weighted by word frequency."""
    if not word_counts:
        raise DataError("empty corpus: no words to seed from")
    max_len = config.seed_max_piece_len
    counter: Counter = Counter()
    for word, freq in sorted(word_counts.items()):
        n = len(word)
        for i in range(n):
            top = min(n, i + max_len)
            for j in range(i + 1, top + 1):
                counter[word[i:j]] += freq

    candidates = {s: c for s, c in counter.items()
                  if c >= config.seed_threshold and s != UNK_SURFACE}
    ordered = sorted(candidates.items(), key=lambda kv: (-kv[1], kv[0]))
    kept = dict(ordered[:config.effective_seed_max_size])
    for surface in sorted(required_surfaces(word_counts, config.meta_symbol)):
        if surface not in kept:
            count = counter.get(surface)
            if count is None:
                count = _overlapping_count(word_counts, surface)
            kept[surface] = count
    out = [SeedCandidate(s, c) for s, c in
           sorted(kept.items(), key=lambda kv: (-kv[1], kv[0]))]
    return out


class _TrainState:
    """Mutable trainer internals over a fixed, lexicographically sorted piece
    universe.  Pruning restricts the ``alive`` subset and filters the cached
    per-word lattices instead of rebuilding them; relative piece order (the
    tie-break rank) is preserved because a subset of a sorted list is sorted."""

    def __init__(self, surfaces: list[str], probs: list[float],
                 words: list[tuple[str, int]]):
        order = sorted(range(len(surfaces)), key=lambda i: surfaces[i])
        self.surfaces = [surfaces[i] for i in order]
        self.probs = [probs[i] for i in order]
        self.alive = list(range(len(self.surfaces)))
        self.words = words
        self.matcher = PieceMatcher(
            self.surfaces, [_safe_log(p) for p in self.probs])
        self.scores = self.matcher.scores  # live array, updated in place
        self._lattices: dict[str, tuple] = {}

    def __len__(self) -> int:
        return len(self.alive)

    def alive_surfaces(self) -> list[str]:
        return [self.surfaces[pid] for pid in self.alive]

    def alive_probs(self) -> list[float]:
        return [self.probs[pid] for pid in self.alive]

    def lattice(self, word: str) -> tuple:
        arrays = self._lattices.get(word)
        if arrays is None:
            arrays = self.matcher.lattice_arrays(word)
            self._lattices[word] = arrays
        return arrays

    def set_alive_probs(self, probs: list[float]) -> None:
        for pid, p in zip(self.alive, probs):
            self.probs[pid] = p
            self.scores[pid] = _safe_log(p)

    def restrict(self, new_alive: list[int]) -> None:
        """Keep only ``new_alive`` pieces and filter every cached lattice."""
        keep = array("b", bytes(len(self.surfaces)))
        for pid in new_alive:
            keep[pid] = 1
        for word, _ in self.words:
            self.lattice(word)  # lazy entries must exist before filtering
        self._lattices = {
            word: kernels.filter_lattice(*arrays, keep)
            for word, arrays in self._lattices.items()
        }
        self.alive = list(new_alive)


def _safe_log(p: float) -> float:
    return math.log(p) if p > 0.0 else math.log(_PROB_FLOOR)


def _normalize_alive(counts, alive: list[int]) -> list[float]:
    clamped = [counts[pid] if counts[pid] > _PROB_FLOOR else _PROB_FLOOR
               for pid in alive]
    total = math.fsum(clamped)
    return [c / total for c in clamped]


def _em_pass_serial(state: _TrainState) -> tuple[array, float]:
    counts = array("d", bytes(8 * len(state.surfaces)))
    loglik_terms = []
    for word, freq in state.words:
        n, end_off, e_start, e_pid, st_off, s_end, s_pid = state.lattice(word)
        log_z = kernels.expected_counts(n, end_off, e_start, e_pid,
                                        st_off, s_end, s_pid,
                                        state.scores, float(freq), counts)
        if log_z == -math.inf:
            raise TrainingError(f"word {word!r} has no segmentation under the "
                                f"current vocabulary")
        loglik_terms.append(freq * log_z)
    return counts, math.fsum(loglik_terms)


# --- optional multi-process E-step -----------------------------------------

_WORKER: dict = {}


def _estep_worker_init(surfaces, chunks):
    _WORKER["matcher"] = PieceMatcher(surfaces, [0.0] * len(surfaces))
    _WORKER["chunks"] = chunks
    _WORKER["lattices"] = {}


def _estep_worker_run(task):
    chunk_id, scores_list = task
    matcher: PieceMatcher = _WORKER["matcher"]
    lattices: dict = _WORKER["lattices"]
    scores = array("d", scores_list)
    counts = array("d", bytes(8 * len(scores)))
    loglik_terms = []
    for word, freq in _WORKER["chunks"][chunk_id]:
        arrays = lattices.get(word)
        if arrays is None:
            arrays = matcher.lattice_arrays(word)
            lattices[word] = arrays
        n, end_off, e_start, e_pid, st_off, s_end, s_pid = arrays
        log_z = kernels.expected_counts(n, end_off, e_start, e_pid,
                                        st_off, s_end, s_pid,
                                        scores, float(freq), counts)
        if log_z == -math.inf:
            return word, None, None
        loglik_terms.append(freq * log_z)
    return None, counts, math.fsum(loglik_terms)


class _ParallelEStep:
    """Shards the word table over worker processes; results are merged in
    shard order, so a fixed thread count reproduces its own results.

    Workers operate in a local pid space over the currently alive surfaces
    (same relative order as the main process), so one executor serves one
    pruning round.
    """

    def __init__(self, state: _TrainState, threads: int):
        self.alive = list(state.alive)
        chunk_size = (len(state.words) + threads - 1) // threads
        self.chunks = [state.words[i:i + chunk_size]
                       for i in range(0, len(state.words), chunk_size)]
        self.executor = ProcessPoolExecutor(
            max_workers=threads,
            initializer=_estep_worker_init,
            initargs=(state.alive_surfaces(), self.chunks))

    def run(self, state: _TrainState) -> tuple[array, float]:
        scores_list = [state.scores[pid] for pid in self.alive]
        futures = [self.executor.submit(_estep_worker_run, (i, scores_list))
                   for i in range(len(self.chunks))]
        total_counts = array("d", bytes(8 * len(state.surfaces)))
        logliks = []
        for future in futures:
            bad_word, counts, loglik = future.result()
            if bad_word is not None:
                raise TrainingError(
                    f"word {bad_word!r} has no segmentation under the current "
                    f"vocabulary")
            for j, c in enumerate(counts):
                total_counts[self.alive[j]] += c
            logliks.append(loglik)
        return total_counts, math.fsum(logliks)

    def close(self) -> None:
        self.executor.shutdown()


def _em_pass(state: _TrainState, parallel: _ParallelEStep | None):
    if parallel is not None:
        return parallel.run(state)
    return _em_pass_serial(state)


def _prune_state(state: _TrainState, shrink_factor: float, required: set[str],
                 expected: array | None, floor_size: int = 0):
    """Viterbi-loss pruning.  Returns (surviving alive pids, renormalized
    probs aligned with them, progressed flag)."""
    surfaces = state.surfaces
    prunable = [pid for pid in state.alive if surfaces[pid] not in required]
    if not prunable:
        return list(state.alive), _normalize_alive(state.probs, state.alive), False

    if expected is None:
        expected, _ = _em_pass_serial(state)

    # words whose best path uses each piece, plus that path's score
    usage: dict[int, list[tuple[str, int, float]]] = {}
    for word, freq in state.words:
        n, end_off, e_start, e_pid, _, _, _ = state.lattice(word)
        result = kernels.viterbi_path(n, end_off, e_start, e_pid, state.scores)
        if result is None:
            raise TrainingError(f"word {word!r} has no segmentation under the "
                                f"current vocabulary")
        pids, best_score = result
        for pid in sorted(set(pids)):
            usage.setdefault(pid, []).append((word, freq, best_score))

    prunable_set = set(prunable)
    loss = {}
    for pid in prunable:
        loss[pid] = -expected[pid]  # fallback rank for pieces off every best path
    for pid, items in usage.items():
        if pid not in prunable_set:
            continue
        acc = 0.0
        for word, freq, best_score in items:
            n, end_off, e_start, e_pid, _, _, _ = state.lattice(word)
            alt = kernels.viterbi_path(n, end_off, e_start, e_pid,
                                       state.scores, pid)
            if alt is None:
                acc = math.inf
                break
            acc += freq * (best_score - alt[1])
        loss[pid] = acc

    keep_n = max(math.ceil(shrink_factor * len(prunable)), floor_size)
    if keep_n >= len(prunable):
        logger.warning("prune kept all %d prunable pieces (shrink %.3f, floor "
                       "%d); vocabulary cannot shrink further",
                       len(prunable), shrink_factor, floor_size)
        return list(state.alive), _normalize_alive(state.probs, state.alive), False

    ranked = sorted(prunable, key=lambda pid: (-loss[pid], surfaces[pid]))
    kept_pids = set(ranked[:keep_n])
    kept_pids.update(pid for pid in state.alive if surfaces[pid] in required)
    survivors = sorted(kept_pids)
    new_probs = _normalize_alive(state.probs, survivors)
    return survivors, new_probs, True


# --- public operations ------------------------------------------------------


def _state_from_vocab(word_counts: Mapping[str, int],
                      vocab: Vocabulary) -> _TrainState:
    # the reserved unknown piece never participates in re-estimation
    surfaces = [s for s in vocab.surfaces() if s != UNK_SURFACE]
    probs = [math.exp(vocab.score(s)) for s in surfaces]
    words = sorted(word_counts.items())
    return _TrainState(surfaces, probs, words)


def _with_unk(pieces: list[Piece], vocab: Vocabulary) -> list[Piece]:
    if UNK_SURFACE in vocab:
        pieces.append(Piece(UNK_SURFACE, vocab.score(UNK_SURFACE)))
    return pieces


def em_step(word_counts: Mapping[str, int],
            vocab: Vocabulary) -> tuple[Vocabulary, float]:
    """One EM iteration: returns the re-estimated vocabulary and the
    pre-update corpus log-likelihood (nats)."""
    if not word_counts:
        raise DataError("empty corpus")
    state = _state_from_vocab(word_counts, vocab)
    counts, loglik = _em_pass_serial(state)
    probs = _normalize_alive(counts, state.alive)
    pieces = [Piece(s, _safe_log(p))
              for s, p in zip(state.alive_surfaces(), probs)]
    return (Vocabulary(_with_unk(pieces, vocab), vocab.scheme,
                       vocab.meta_symbol), loglik)


def prune(vocab: Vocabulary, word_counts: Mapping[str, int],
          shrink_factor: float, floor_size: int = 0) -> Vocabulary:
    """Drop the lowest-likelihood-loss pieces, keeping the
    ``ceil(shrink_factor x prunable)`` highest-loss ones (at least
    ``floor_size``) plus all required pieces; survivors are renormalized."""
    if not word_counts:
        raise DataError("empty corpus")
    state = _state_from_vocab(word_counts, vocab)
    required = required_surfaces(word_counts, vocab.meta_symbol)
    survivors, probs, _ = _prune_state(state, shrink_factor, required,
                                       expected=None, floor_size=floor_size)
    pieces = [Piece(state.surfaces[pid], _safe_log(p))
              for pid, p in zip(survivors, probs)]
    return Vocabulary(_with_unk(pieces, vocab), vocab.scheme,
                      vocab.meta_symbol)


def train_detailed(corpus_lines: Iterable[str],
                   config: TrainerConfig) -> TrainResult:
    """Full training loop with per-round diagnostics."""
    word_counts = marked_word_counts(corpus_lines, config)
    if not word_counts:
        raise DataError("empty corpus: nothing to train on")
    required = required_surfaces(word_counts, config.meta_symbol)
    if config.target_vocab_size < len(required):
        raise DataError(
            f"target_vocab_size {config.target_vocab_size} is below the "
            f"{len(required)} required character pieces for this corpus")

    seeds = seed_vocabulary(word_counts, config)
    total_mass = sum(c.count for c in seeds)
    state = _TrainState([c.surface for c in seeds],
                        [c.count / total_mass for c in seeds],
                        sorted(word_counts.items()))

    parallel = None
    if config.threads > 1:
        parallel = _ParallelEStep(state, config.threads)

    target = config.target_vocab_size
    floor = max(target - len(required), 0)
    rounds: list[RoundLog] = []
    reached_target = True
    try:
        round_index = 0
        while len(state) > target:
            log = RoundLog(round_index=round_index, size_before=len(state))
            counts = None
            for _ in range(config.em_iters_per_round):
                counts, loglik = _em_pass(state, parallel)
                log.logliks.append(loglik)
                state.set_alive_probs(_normalize_alive(counts, state.alive))
            survivors, probs, progressed = _prune_state(
                state, config.shrink_factor, required, counts, floor)
            if parallel is not None:
                parallel.close()
                parallel = None
            state.restrict(survivors)
            state.set_alive_probs(probs)
            if config.threads > 1 and len(state) > target and progressed:
                parallel = _ParallelEStep(state, config.threads)
            log.size_after = len(state)
            log.prob_mass_after_prune = math.fsum(state.alive_probs())
            rounds.append(log)
            round_index += 1
            if not progressed:
                reached_target = len(state) <= target
                if not reached_target:
                    logger.warning(
                        "stopping at %d pieces; target %d is unreachable "
                        "without dropping required pieces", len(state), target)
                break

        final_logliks = []
        for _ in range(config.em_iters_per_round):
            counts, loglik = _em_pass(state, parallel)
            final_logliks.append(loglik)
            state.set_alive_probs(_normalize_alive(counts, state.alive))
    finally:
        if parallel is not None:
            parallel.close()

    flip = config.scheme is MarkingScheme.FIN
    pieces = []
    min_score = 0.0
    for surface, prob in zip(state.alive_surfaces(), state.alive_probs()):
        score = _safe_log(prob)
        if score < min_score:
            min_score = score
        pieces.append(Piece(surface[::-1] if flip else surface, score))
    pieces.append(Piece(UNK_SURFACE, min_score - UNK_PENALTY))
    vocab = Vocabulary(pieces, config.scheme, config.meta_symbol)

    return TrainResult(
        vocabulary=vocab,
        rounds=rounds,
        final_logliks=final_logliks,
        final_prob_mass=math.fsum(state.alive_probs()),
        seed_size=len(seeds),
        required_count=len(required),
        reached_target=reached_target,
        distinct_words=len(word_counts),
        total_words=sum(word_counts.values()),
    )


def train(corpus_lines: Iterable[str], config: TrainerConfig) -> Vocabulary:
    """Train a vocabulary; see :func:`train_detailed` for diagnostics."""
    return train_detailed(corpus_lines, config).vocabulary
