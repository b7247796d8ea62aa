"""Pure-Python lattice dynamic programming kernels.

Reference implementation of the two hot loops: best-path (Viterbi) decoding
and forward-backward expected-count accumulation over a single word's
segmentation lattice.  The compiled twin in ``_speed.pyx`` mirrors this code
operation-for-operation so both backends produce identical floats.

Lattice encoding (CSR, all ``array`` buffers):

* positions run 0..n over the word's code points;
* ``end_off[e] .. end_off[e+1]`` indexes edges ending at position ``e``
  inside ``e_start``/``e_pid`` (length n+2 offsets);
* ``st_off[s] .. st_off[s+1]`` indexes edges starting at ``s`` inside
  ``s_end``/``s_pid``.

Piece ids double as lexicographic ranks: callers must assign ids in sorted
surface order for the documented tie-breaking to apply.
"""

from __future__ import annotations

from math import exp, log, inf


def _materialize(back_start, back_pid, node):
    """Path of piece ids into ``node``, front to back, via back pointers."""
    pids = []
    while node > 0:
        pids.append(back_pid[node])
        node = back_start[node]
    pids.reverse()
    return pids


def viterbi_path(n, end_off, e_start, e_pid, scores, banned_pid=-1):
    """Best path through the lattice: max total score, then fewest pieces,
    then lexicographically smallest piece-id sequence.

    Returns ``(pids, total_score)`` or ``None`` when no full path exists.
    """
    NEG = -inf
    best = [NEG] * (n + 1)
    count = [0] * (n + 1)
    back_start = [0] * (n + 1)
    back_pid = [-1] * (n + 1)
    best[0] = 0.0

    for e in range(1, n + 1):
        lo = end_off[e]
        hi = end_off[e + 1]
        for k in range(lo, hi):
            pid = e_pid[k]
            if pid == banned_pid:
                continue
            s = e_start[k]
            prev = best[s]
            if prev == NEG:
                continue
            cand = prev + scores[pid]
            cur = best[e]
            if cand > cur:
                take = True
            elif cand < cur:
                take = False
            else:
                cand_count = count[s] + 1
                cur_count = count[e]
                if cand_count != cur_count:
                    take = cand_count < cur_count
                else:
                    cand_path = _materialize(back_start, back_pid, s)
                    cand_path.append(pid)
                    cur_path = _materialize(back_start, back_pid, e)
                    take = cand_path < cur_path
            if take:
                best[e] = cand
                count[e] = count[s] + 1
                back_start[e] = s
                back_pid[e] = pid

    if best[n] == NEG:
        return None
    return _materialize(back_start, back_pid, n), best[n]


def filter_lattice(n, end_off, e_start, e_pid, st_off, s_end, s_pid, keep):
    """Drop edges whose piece id has ``keep[pid] == 0``; relative edge order
    is preserved, so downstream arithmetic is unchanged."""
    from array import array

    new_end_off = array("q", bytes(8 * (n + 2)))
    new_e_start = array("q")
    new_e_pid = array("q")
    for e in range(n + 1):
        for k in range(end_off[e], end_off[e + 1]):
            pid = e_pid[k]
            if keep[pid]:
                new_e_start.append(e_start[k])
                new_e_pid.append(pid)
        new_end_off[e + 1] = len(new_e_start)
    new_st_off = array("q", bytes(8 * (n + 2)))
    new_s_end = array("q")
    new_s_pid = array("q")
    for s in range(n + 1):
        for k in range(st_off[s], st_off[s + 1]):
            pid = s_pid[k]
            if keep[pid]:
                new_s_end.append(s_end[k])
                new_s_pid.append(pid)
        new_st_off[s + 1] = len(new_s_end)
    return n, new_end_off, new_e_start, new_e_pid, new_st_off, new_s_end, new_s_pid


def expected_counts(n, end_off, e_start, e_pid, st_off, s_end, s_pid,
                    scores, freq, counts):
    """Forward-backward pass; adds ``freq``-weighted expected piece counts
    into ``counts`` and returns log Z (total segmentation log-probability).

    Returns ``-inf`` without touching ``counts`` when the word has no path.
    """
    NEG = -inf
    alpha = [NEG] * (n + 1)
    alpha[0] = 0.0
    for e in range(1, n + 1):
        lo = end_off[e]
        hi = end_off[e + 1]
        m = NEG
        for k in range(lo, hi):
            s = e_start[k]
            prev = alpha[s]
            if prev == NEG:
                continue
            v = prev + scores[e_pid[k]]
            if v > m:
                m = v
        if m == NEG:
            continue
        acc = 0.0
        for k in range(lo, hi):
            s = e_start[k]
            prev = alpha[s]
            if prev == NEG:
                continue
            acc += exp(prev + scores[e_pid[k]] - m)
        alpha[e] = m + log(acc)

    log_z = alpha[n]
    if log_z == NEG:
        return NEG

    beta = [NEG] * (n + 1)
    beta[n] = 0.0
    for s in range(n - 1, -1, -1):
        lo = st_off[s]
        hi = st_off[s + 1]
        m = NEG
        for k in range(lo, hi):
            nxt = beta[s_end[k]]
            if nxt == NEG:
                continue
            v = scores[s_pid[k]] + nxt
            if v > m:
                m = v
        if m == NEG:
            continue
        acc = 0.0
        for k in range(lo, hi):
            nxt = beta[s_end[k]]
            if nxt == NEG:
                continue
            acc += exp(scores[s_pid[k]] + nxt - m)
        beta[s] = m + log(acc)

    for s in range(0, n):
        a = alpha[s]
        if a == NEG:
            continue
        lo = st_off[s]
        hi = st_off[s + 1]
        for k in range(lo, hi):
            b = beta[s_end[k]]
            if b == NEG:
                continue
            pid = s_pid[k]
            counts[pid] += freq * exp(a + scores[pid] + b - log_z)

    return log_z
