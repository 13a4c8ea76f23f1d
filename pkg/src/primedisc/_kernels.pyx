# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled discovery kernel; same contract as ``primedisc._fallback.discover``.

Decoding at a receiver depends only on that receiver's own links (IC
subtracts only what the receiver itself has decoded), so each receiver is
simulated on its own and only until its last link is decoded.  Within a
phase, rounds are visited in increasing residue order, which is the order
they occur in time.  The network finishes at the latest link round.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def discover(const i64[::1] indptr, const i64[::1] indices, const i64[::1] labels,
             const i64[::1] primes, bint ic):
    cdef Py_ssize_t k = indptr.shape[0] - 1
    cdef Py_ssize_t n_links = indices.shape[0]
    cdef Py_ssize_t n_phases = primes.shape[0]

    link_round_arr = np.zeros(n_links, dtype=np.int64)
    cdef i64[::1] link_round = link_round_arr
    if n_links == 0:
        return link_round_arr, 0, -1, 0, True

    cdef Py_ssize_t max_deg = 0
    cdef Py_ssize_t j
    for j in range(k):
        if indptr[j + 1] - indptr[j] > max_deg:
            max_deg = indptr[j + 1] - indptr[j]
    cdef i64[::1] offsets = np.zeros(n_phases + 1, dtype=np.int64)
    for j in range(n_phases):
        offsets[j + 1] = offsets[j] + primes[j]
    cdef i64[::1] res = np.empty(max_deg, dtype=np.int64)
    cdef i64[::1] order = np.empty(max_deg, dtype=np.int64)

    cdef i64 latest = 0, p, v, key
    cdef Py_ssize_t lo, d, left, m, a, b, g, n_active, pick, x
    cdef bint complete = True

    for j in range(k):
        lo = indptr[j]
        d = indptr[j + 1] - lo
        left = d
        m = 0
        while left > 0 and m < n_phases:
            p = primes[m]
            # residues of this receiver's links, insertion-sorted
            for a in range(d):
                key = labels[indices[lo + a] - 1] % p
                b = a
                while b > 0 and res[b - 1] > key:
                    res[b] = res[b - 1]
                    order[b] = order[b - 1]
                    b -= 1
                res[b] = key
                order[b] = a
            g = 0
            while g < d:
                v = res[g]
                n_active = 0
                pick = -1
                x = g
                while x < d and res[x] == v:
                    if not ic or link_round[lo + order[x]] == 0:
                        n_active += 1
                        pick = order[x]
                    x += 1
                if n_active == 1 and link_round[lo + pick] == 0:
                    link_round[lo + pick] = offsets[m] + v + 1
                    left -= 1
                    if offsets[m] + v + 1 > latest:
                        latest = offsets[m] + v + 1
                g = x
            m += 1
        if left > 0:
            complete = False

    if not complete:
        return link_round_arr, n_phases, primes[n_phases - 1] - 1, offsets[n_phases], False
    m = 0
    while offsets[m + 1] < latest:
        m += 1
    return link_round_arr, m + 1, latest - offsets[m] - 1, latest, True
