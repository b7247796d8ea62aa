# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled lattice DP kernels; mirrors ``_pure`` operation-for-operation.

Both backends must produce identical floats: keep the arithmetic order in
sync with ``_pure.py`` when editing either file.
"""

from cpython cimport array
import array

from libc.math cimport exp, log
from libc.stdlib cimport malloc, free


def filter_lattice(Py_ssize_t n,
                   long long[::1] end_off,
                   long long[::1] e_start,
                   long long[::1] e_pid,
                   long long[::1] st_off,
                   long long[::1] s_end,
                   long long[::1] s_pid,
                   signed char[::1] keep):
    """Drop edges whose piece id has ``keep[pid] == 0``; order preserved."""
    cdef Py_ssize_t e, s, k, m
    cdef long long pid

    m = 0
    for k in range(e_pid.shape[0]):
        if keep[e_pid[k]]:
            m += 1

    cdef array.array template = array.array("q", [])
    cdef array.array new_end_off = array.clone(template, n + 2, zero=True)
    cdef array.array new_e_start = array.clone(template, m, zero=False)
    cdef array.array new_e_pid = array.clone(template, m, zero=False)
    cdef array.array new_st_off = array.clone(template, n + 2, zero=True)
    cdef array.array new_s_end = array.clone(template, m, zero=False)
    cdef array.array new_s_pid = array.clone(template, m, zero=False)
    cdef long long[::1] v_end_off = new_end_off
    cdef long long[::1] v_e_start = new_e_start
    cdef long long[::1] v_e_pid = new_e_pid
    cdef long long[::1] v_st_off = new_st_off
    cdef long long[::1] v_s_end = new_s_end
    cdef long long[::1] v_s_pid = new_s_pid

    cdef Py_ssize_t pos = 0
    for e in range(n + 1):
        for k in range(end_off[e], end_off[e + 1]):
            pid = e_pid[k]
            if keep[pid]:
                v_e_start[pos] = e_start[k]
                v_e_pid[pos] = pid
                pos += 1
        v_end_off[e + 1] = pos
    pos = 0
    for s in range(n + 1):
        for k in range(st_off[s], st_off[s + 1]):
            pid = s_pid[k]
            if keep[pid]:
                v_s_end[pos] = s_end[k]
                v_s_pid[pos] = pid
                pos += 1
        v_st_off[s + 1] = pos
    return (n, new_end_off, new_e_start, new_e_pid,
            new_st_off, new_s_end, new_s_pid)


cdef list _materialize(long long* back_start, long long* back_pid, Py_ssize_t node):
    cdef list pids = []
    while node > 0:
        pids.append(back_pid[node])
        node = back_start[node]
    pids.reverse()
    return pids


def viterbi_path(Py_ssize_t n,
                 long long[::1] end_off,
                 long long[::1] e_start,
                 long long[::1] e_pid,
                 double[::1] scores,
                 long long banned_pid=-1):
    """Best path: max total score, then fewest pieces, then smallest id sequence."""
    cdef double NEG = -float("inf")
    cdef double* best = <double*> malloc((n + 1) * sizeof(double))
    cdef long long* count = <long long*> malloc((n + 1) * sizeof(long long))
    cdef long long* back_start = <long long*> malloc((n + 1) * sizeof(long long))
    cdef long long* back_pid = <long long*> malloc((n + 1) * sizeof(long long))
    if best == NULL or count == NULL or back_start == NULL or back_pid == NULL:
        free(best); free(count); free(back_start); free(back_pid)
        raise MemoryError()

    cdef Py_ssize_t e, k, lo, hi
    cdef long long pid, s, cand_count, cur_count
    cdef double prev, cand, cur
    cdef bint take
    cdef list cand_path, cur_path

    try:
        for e in range(n + 1):
            best[e] = NEG
            count[e] = 0
            back_start[e] = 0
            back_pid[e] = -1
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
    finally:
        free(best)
        free(count)
        free(back_start)
        free(back_pid)


def expected_counts(Py_ssize_t n,
                    long long[::1] end_off,
                    long long[::1] e_start,
                    long long[::1] e_pid,
                    long long[::1] st_off,
                    long long[::1] s_end,
                    long long[::1] s_pid,
                    double[::1] scores,
                    double freq,
                    double[::1] counts):
    """Forward-backward; accumulates freq-weighted posteriors, returns log Z."""
    cdef double NEG = -float("inf")
    cdef double* alpha = <double*> malloc((n + 1) * sizeof(double))
    cdef double* beta = <double*> malloc((n + 1) * sizeof(double))
    if alpha == NULL or beta == NULL:
        free(alpha); free(beta)
        raise MemoryError()

    cdef Py_ssize_t e, s, k, lo, hi
    cdef double m, v, acc, prev, nxt, a, b, log_z
    cdef long long pid

    try:
        for e in range(n + 1):
            alpha[e] = NEG
        alpha[0] = 0.0
        for e in range(1, n + 1):
            lo = end_off[e]
            hi = end_off[e + 1]
            m = NEG
            for k in range(lo, hi):
                prev = alpha[e_start[k]]
                if prev == NEG:
                    continue
                v = prev + scores[e_pid[k]]
                if v > m:
                    m = v
            if m == NEG:
                continue
            acc = 0.0
            for k in range(lo, hi):
                prev = alpha[e_start[k]]
                if prev == NEG:
                    continue
                acc += exp(prev + scores[e_pid[k]] - m)
            alpha[e] = m + log(acc)

        log_z = alpha[n]
        if log_z == NEG:
            return log_z

        for e in range(n + 1):
            beta[e] = NEG
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
    finally:
        free(alpha)
        free(beta)
