"""Single-hop bipartite topologies: K transmitters, K receivers.

Receivers and transmitters are 1-based.  Adjacency is stored CSR-style:
``indices[indptr[j-1]:indptr[j]]`` are the transmitters heard by receiver
``j``, sorted ascending.  Each transmitter also carries a schedule label,
which is its own index unless remapped for local connectivity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

FORMAT_VERSION = 1
DEGREE_MODES = ("exact", "at-most")

# Above this many K*K cells the random-key sampler gets too large.
_DENSE_SAMPLING_CELLS = 1 << 20


@dataclass(frozen=True, eq=False)
class Topology:
    k: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        for name in ("indptr", "indices", "labels"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.indptr.shape != (self.k + 1,) or self.indptr[0] != 0:
            raise ValueError("indptr must have k+1 entries starting at 0")
        if np.any(np.diff(self.indptr) < 0) or self.indptr[-1] != self.indices.size:
            raise ValueError("indptr is not a valid offset array")
        if self.indices.size and (self.indices.min() < 1 or self.indices.max() > self.k):
            raise ValueError(f"transmitter indices must lie in [1, {self.k}]")
        if self.labels.shape != (self.k,) or (self.k and self.labels.min() < 1):
            raise ValueError("labels must be k positive integers")
        same_row = np.ones(max(self.indices.size - 1, 0), dtype=bool)
        starts = self.indptr[1:-1]
        same_row[starts[(starts > 0) & (starts < self.indices.size)] - 1] = False
        if np.any(np.diff(self.indices)[same_row] <= 0):
            raise ValueError("neighbor lists must be strictly ascending and duplicate-free")

    @classmethod
    def from_neighbors(cls, neighbors: Sequence[Sequence[int]], labels=None) -> "Topology":
        k = len(neighbors)
        rows = [sorted(set(int(t) for t in row)) for row in neighbors]
        indptr = np.zeros(k + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in rows])
        indices = np.fromiter((t for r in rows for t in r), dtype=np.int64, count=int(indptr[-1]))
        if labels is None:
            labels = np.arange(1, k + 1)
        return cls(k, indptr, indices, np.asarray(labels))

    @property
    def num_links(self) -> int:
        return int(self.indices.size)

    def neighbors(self, receiver: int) -> tuple[int, ...]:
        if not 1 <= receiver <= self.k:
            raise IndexError(f"receiver {receiver} outside [1, {self.k}]")
        return tuple(int(t) for t in self.indices[self.indptr[receiver - 1] : self.indptr[receiver]])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.k else 0

    def label(self, transmitter: int) -> int:
        return int(self.labels[transmitter - 1])

    def receiver_of_link(self) -> np.ndarray:
        """Receiver index (1-based) of every link, aligned with ``indices``."""
        return np.repeat(np.arange(1, self.k + 1, dtype=np.int64), self.degrees())

    def link_labels(self) -> np.ndarray:
        return self.labels[self.indices - 1]

    def links(self) -> Iterator[tuple[int, int]]:
        """(receiver, transmitter) pairs in storage order."""
        rx = self.receiver_of_link()
        return zip(rx.tolist(), self.indices.tolist())

    def has_link(self, receiver: int, transmitter: int) -> bool:
        row = self.indices[self.indptr[receiver - 1] : self.indptr[receiver]]
        pos = np.searchsorted(row, transmitter)
        return bool(pos < row.size and row[pos] == transmitter)

    def duplicate_label_receivers(self) -> list[int]:
        """Receivers whose neighbor labels are not pairwise distinct."""
        rx = self.receiver_of_link()
        lab = self.link_labels()
        order = np.lexsort((lab, rx))
        rx, lab = rx[order], lab[order]
        clash = (rx[1:] == rx[:-1]) & (lab[1:] == lab[:-1])
        return np.unique(rx[1:][clash]).tolist()

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "k": self.k,
            "neighbors": [list(self.neighbors(j)) for j in range(1, self.k + 1)],
            "labels": self.labels.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Topology":
        if data.get("format") != FORMAT_VERSION:
            raise ValueError(f"unsupported topology format {data.get('format')!r}")
        if len(data["neighbors"]) != data["k"]:
            raise ValueError("neighbors list length does not match k")
        return cls.from_neighbors(data["neighbors"], data["labels"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None


def _sample_rows(K: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """K rows, each L distinct values from 1..K in uniformly random order."""
    if L * (L - 1) <= K:
        # iid draws conditioned on distinctness are uniform over ordered
        # L-tuples of distinct values; acceptance rate stays above ~0.6.
        rows = rng.integers(1, K + 1, size=(K, L))
        while True:
            s = np.sort(rows, axis=1)
            bad = np.flatnonzero(np.any(s[:, 1:] == s[:, :-1], axis=1))
            if bad.size == 0:
                return rows
            rows[bad] = rng.integers(1, K + 1, size=(bad.size, L))
    if K * K <= _DENSE_SAMPLING_CELLS:
        keys = rng.random((K, K))
        return np.argsort(keys, axis=1)[:, :L] + 1
    return np.stack([rng.choice(K, size=L, replace=False) + 1 for _ in range(K)])


def generate_random(K: int, L: int, degree_mode: str = "exact", seed: int = 0) -> Topology:
    """Each receiver picks L (or a uniform 1..L) distinct transmitters uniformly."""
    if L < 1 or L >= K:
        raise ValueError(f"need 1 <= L < K, got K={K}, L={L}")
    if degree_mode not in DEGREE_MODES:
        raise ValueError(f"degree_mode must be one of {DEGREE_MODES}, got {degree_mode!r}")
    rng = np.random.default_rng(seed)
    if degree_mode == "exact":
        degrees = np.full(K, L, dtype=np.int64)
    else:
        degrees = rng.integers(1, L + 1, size=K)
    rows = _sample_rows(K, L, rng)
    keep = np.arange(L)[None, :] < degrees[:, None]
    rows = np.sort(np.where(keep, rows, K + 1), axis=1)
    indptr = np.zeros(K + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(degrees)
    indices = rows[rows <= K]
    return Topology(K, indptr, indices, np.arange(1, K + 1))


def apply_erasures(topology: Topology, erasure_prob: float, seed: int = 0) -> Topology:
    """Drop each link independently with probability ``erasure_prob``."""
    if not 0.0 <= erasure_prob <= 1.0:
        raise ValueError(f"erasure_prob must lie in [0, 1], got {erasure_prob}")
    rng = np.random.default_rng(seed)
    keep = rng.random(topology.num_links) >= erasure_prob
    rx = topology.receiver_of_link()[keep]
    indptr = np.zeros(topology.k + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(rx - 1, minlength=topology.k))
    return Topology(topology.k, indptr, topology.indices[keep], topology.labels)


def local_label(transmitter: int, radius: int) -> int:
    return transmitter % (2 * radius + 2) + 1


def local_label_universe(radius: int) -> int:
    # (j mod (2r+2)) + 1 reaches 2r+2, one past the often-quoted 2r+1.
    return 2 * radius + 2


def build_local(K: int, radius: int, seed: int = 0, link_prob: float = 1.0) -> Topology:
    """Receiver i hears transmitters j with |i - j| <= radius, labels remapped.

    Each in-range candidate is kept independently with ``link_prob``
    (default: all kept).
    """
    if radius < 1 or 2 * radius + 1 > K:
        raise ValueError(f"need radius >= 1 and 2*radius+1 <= K, got K={K}, radius={radius}")
    if not 0.0 <= link_prob <= 1.0:
        raise ValueError(f"link_prob must lie in [0, 1], got {link_prob}")
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(1, K + 1):
        cand = np.arange(max(1, i - radius), min(K, i + radius) + 1)
        if link_prob < 1.0:
            cand = cand[rng.random(cand.size) < link_prob]
        rows.append(cand.tolist())
    labels = np.arange(1, K + 1) % (2 * radius + 2) + 1
    return Topology.from_neighbors(rows, labels)
