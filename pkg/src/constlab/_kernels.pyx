# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled detection kernels (hot path of the Monte Carlo channel).

Decision-identical to _kernels_py: same quantization rule
(ceil(p - 0.5), midpoints to the lower level), stable ascending ranking
(ties to the lower coordinate position), first-minimum brute-force
search.  All loops run without the GIL so the chunk pool can use threads.
"""

from libc.math cimport ceil, INFINITY

NAME = "compiled"


def count_threshold(const double[:, ::1] received,
                    const signed char[:, ::1] sent,
                    double lev0, double spacing, int two_k, int q):
    if two_k > 32:
        raise ValueError("compiled threshold kernel supports at most 32 levels")
    cdef Py_ssize_t trials = received.shape[0]
    cdef long long coord = 0, block = 0, msg = 0, invalid = 0
    cdef Py_ssize_t t, b, i, base
    cdef int qi
    cdef double p
    cdef unsigned int seen, full = (1u << two_k) - 1u
    cdef bint trial_bad, block_bad
    with nogil:
        for t in range(trials):
            trial_bad = False
            for b in range(q):
                base = b * two_k
                block_bad = False
                seen = 0u
                for i in range(two_k):
                    p = (received[t, base + i] - lev0) / spacing
                    qi = <int>ceil(p - 0.5)
                    if qi < 0:
                        qi = 0
                    elif qi >= two_k:
                        qi = two_k - 1
                    if qi != sent[t, base + i]:
                        coord += 1
                        block_bad = True
                    seen |= (1u << qi)
                if seen != full:
                    invalid += 1
                if block_bad:
                    block += 1
                    trial_bad = True
            if trial_bad:
                msg += 1
    return int(coord), int(block), int(msg), int(invalid)


def count_rank(const double[:, ::1] received,
               const signed char[:, ::1] sent,
               int two_k, int q):
    if two_k > 64:
        raise ValueError("compiled rank kernel supports at most 64 levels")
    cdef Py_ssize_t trials = received.shape[0]
    cdef long long coord = 0, block = 0, msg = 0
    cdef Py_ssize_t t, b, i, j, base
    cdef int r, pp
    cdef double v
    cdef double vals[64]
    cdef int pos[64]
    cdef bint trial_bad, block_bad
    with nogil:
        for t in range(trials):
            trial_bad = False
            for b in range(q):
                base = b * two_k
                for i in range(two_k):
                    vals[i] = received[t, base + i]
                    pos[i] = <int>i
                # stable insertion sort ascending
                for i in range(1, two_k):
                    v = vals[i]
                    pp = pos[i]
                    j = i
                    while j > 0 and vals[j - 1] > v:
                        vals[j] = vals[j - 1]
                        pos[j] = pos[j - 1]
                        j -= 1
                    vals[j] = v
                    pos[j] = pp
                block_bad = False
                for r in range(two_k):
                    if sent[t, base + pos[r]] != r:
                        coord += 1
                        block_bad = True
                if block_bad:
                    block += 1
                    trial_bad = True
            if trial_bad:
                msg += 1
    return int(coord), int(block), int(msg), 0


def count_ml(const double[:, ::1] received,
             const signed char[:, ::1] sent,
             const double[:, ::1] table,
             const signed char[:, ::1] table_idx,
             int two_k, int q):
    cdef Py_ssize_t trials = received.shape[0]
    cdef Py_ssize_t ncoord = received.shape[1]
    cdef Py_ssize_t m_count = table.shape[0]
    cdef long long coord = 0, block = 0, msg = 0
    cdef Py_ssize_t t, m, i, b, base, best_m
    cdef double d2, diff, best
    cdef bint trial_bad, block_bad
    with nogil:
        for t in range(trials):
            best = INFINITY
            best_m = 0
            for m in range(m_count):
                d2 = 0.0
                for i in range(ncoord):
                    diff = received[t, i] - table[m, i]
                    d2 += diff * diff
                if d2 < best:
                    best = d2
                    best_m = m
            trial_bad = False
            for b in range(q):
                base = b * two_k
                block_bad = False
                for i in range(two_k):
                    if table_idx[best_m, base + i] != sent[t, base + i]:
                        coord += 1
                        block_bad = True
                if block_bad:
                    block += 1
                    trial_bad = True
            if trial_bad:
                msg += 1
    return int(coord), int(block), int(msg), 0
