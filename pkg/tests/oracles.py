"""Independent brute-force oracles used by the test suite.

These deliberately avoid the library's lattice/DP code paths: segmentations
are enumerated recursively, scores are summed left to right (matching the
documented accumulation order), and set computations use plain double loops.
"""

import math
from collections import Counter


def all_segmentations(word: str, scores: dict[str, float]):
    """Every way to split ``word`` into vocabulary pieces, with the
    left-to-right score sum of each."""
    results = []

    def rec(pos, pieces, acc):
        if pos == len(word):
            results.append((list(pieces), acc))
            return
        for end in range(pos + 1, len(word) + 1):
            piece = word[pos:end]
            if piece in scores:
                pieces.append(piece)
                rec(end, pieces, acc + scores[piece])
                pieces.pop()

    rec(0, [], 0.0)
    return results


def brute_best_segmentation(word: str, scores: dict[str, float]):
    """Argmax segmentation under the documented tie rule: max score, then
    fewest pieces, then lexicographically smallest sequence."""
    segmentations = all_segmentations(word, scores)
    if not segmentations:
        return None
    best_score = max(score for _, score in segmentations)
    candidates = [pieces for pieces, score in segmentations
                  if score == best_score]
    candidates.sort(key=lambda pieces: (len(pieces), pieces))
    return candidates[0], best_score


def brute_substring_edges(word: str, surfaces):
    """All (start, end, surface) with word[start:end] in the vocabulary."""
    surface_set = set(surfaces)
    edges = []
    for start in range(len(word)):
        for end in range(start + 1, len(word) + 1):
            sub = word[start:end]
            if sub in surface_set:
                edges.append((start, end, sub))
    return edges


def brute_em(word_counts: dict[str, int], probs: dict[str, float]):
    """Expected counts, re-estimated probabilities, and corpus log-likelihood
    by full path enumeration."""
    counts = Counter()
    loglik = 0.0
    for word, freq in sorted(word_counts.items()):
        paths = all_segmentations(word, {s: math.log(p)
                                         for s, p in probs.items()})
        z = sum(math.exp(score) for _, score in paths)
        assert z > 0, f"{word!r} unsegmentable in oracle"
        loglik += freq * math.log(z)
        for pieces, score in paths:
            weight = math.exp(score) / z
            for piece in pieces:
                counts[piece] += freq * weight
    total = sum(counts.values())
    new_probs = {piece: c / total for piece, c in counts.items()}
    return counts, new_probs, loglik


def brute_coverage(surfaces_bare, lexicon_entries):
    """Double-loop set intersection."""
    matched = set()
    for entry in lexicon_entries:
        for bare in surfaces_bare:
            if bare == entry:
                matched.add(entry)
                break
    return matched


def normal_equations_ols(y, columns):
    """Closed-form (X'X)^-1 X'y with an intercept column prepended."""
    import numpy as np

    y = np.asarray(y, dtype=float)
    design = np.column_stack([np.ones(len(y))] +
                             [np.asarray(c, dtype=float) for c in columns])
    xtx = design.T @ design
    beta = np.linalg.solve(xtx, design.T @ y)
    residuals = y - design @ beta
    df = len(y) - design.shape[1]
    sigma2 = float(residuals @ residuals) / df if df > 0 else float("nan")
    ses = np.sqrt(np.abs(sigma2 * np.diag(np.linalg.inv(xtx))))
    return beta, ses
