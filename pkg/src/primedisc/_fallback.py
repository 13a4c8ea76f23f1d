"""NumPy implementation of the discovery loop, used when the extension is absent.

``discover(indptr, indices, labels, primes, ic)`` takes the CSR adjacency
of a topology (1-based transmitter ``indices``), the per-transmitter
labels and the schedule primes.  It returns ``(link_round, phase, round, rounds, completed)``:
``link_round[e]`` is the cumulative round at which link ``e`` was decoded
(0 if never), ``phase`` is 1-based and ``round`` is the index inside it.
An empty link set yields ``(.., 0, -1, 0, True)``.
"""

from __future__ import annotations

import numpy as np


def discover(indptr, indices, labels, primes, ic, trace=None):
    indptr = np.asarray(indptr, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    link_labels = labels[np.asarray(indices, dtype=np.int64) - 1]
    k = indptr.size - 1
    n_links = link_labels.size
    link_round = np.zeros(n_links, dtype=np.int64)
    if n_links == 0:
        return link_round, 0, -1, 0, True

    rx = np.repeat(np.arange(k, dtype=np.int64), np.diff(indptr))
    primes = [int(p) for p in primes]
    remaining = n_links
    offset = 0
    for m, p in enumerate(primes, start=1):
        res = link_labels % p
        order = np.argsort(res, kind="stable")
        edges = np.searchsorted(res[order], np.arange(p + 1))
        for i in range(p):
            idx = order[edges[i] : edges[i + 1]]
            if ic:
                idx = idx[link_round[idx] == 0]
            counts = np.bincount(rx[idx], minlength=k)
            sole = idx[counts[rx[idx]] == 1]
            new = sole[link_round[sole] == 0]
            link_round[new] = offset + i + 1
            remaining -= new.size
            if trace is not None:
                trace.append((m, p, i, offset + i + 1, new))
            if remaining == 0:
                return link_round, m, i, offset + i + 1, True
        offset += p
    return link_round, len(primes), primes[-1] - 1, offset, False
