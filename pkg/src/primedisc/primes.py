"""Prime enumeration, prime-counting bounds and the distinguishing-prime search.

Everything here is a pure function; the sieve range never exceeds a few
hundred thousand for supported parameters, so a plain Eratosthenes sieve
over a boolean array is enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

# Constant of the explicit upper bound on pi(x).
DUSART_CONSTANT = 1.2762


class LemmaViolation(ArithmeticError):
    """No distinguishing prime exists within the guaranteed bound."""


@dataclass(frozen=True)
class PrimeList:
    bound: float
    primes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __getitem__(self, idx):
        return self.primes[idx]

    @property
    def largest(self) -> int:
        return self.primes[-1]


def _sieve_array(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_upto(x: float) -> PrimeList:
    """All primes <= x in ascending order."""
    if not x >= 2:
        raise ValueError(f"sieve bound must be >= 2, got {x!r}")
    primes = _sieve_array(math.floor(x))
    return PrimeList(bound=float(x), primes=tuple(int(p) for p in primes))


def prime_count(x: float) -> int:
    if x < 2:
        return 0
    return int(_sieve_array(math.floor(x)).size)


def prime_count_table(limit: int) -> np.ndarray:
    """pi(x) for every integer 0 <= x <= limit."""
    flags = np.zeros(limit + 1, dtype=np.int64)
    flags[_sieve_array(limit)] = 1
    return np.cumsum(flags)


def dusart_bound(x):
    """Upper bound (x / ln x) * (1 + 1.2762 / ln x) on pi(x); accepts arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 1):
        raise ValueError("dusart_bound requires x > 1")
    log = np.log(arr)
    out = arr / log * (1.0 + DUSART_CONSTANT / log)
    return float(out) if out.ndim == 0 else out


def is_prime_trial_division(n: int) -> bool:
    """Reference primality check, deliberately independent of the sieve."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def phase_bound(K: int, L: int) -> float:
    """Largest admissible phase prime, L*log2(K), never below 2."""
    return max(2.0, L * math.log2(K))


def find_distinguishing_prime(values: Iterable[int], target: int, n: int) -> int:
    """Smallest prime p <= |values|*log2(n) separating target from the rest mod p.

    Raises LemmaViolation when the search fails, which for valid inputs
    would mean the sieve or the residue logic is broken.
    """
    vals = set(values)
    if not vals:
        raise ValueError("values must be non-empty")
    if target not in vals:
        raise ValueError(f"target {target} not among values")
    if n < 1 or min(vals) < 1 or max(vals) > n:
        raise ValueError(f"values must lie in [1, {n}]")
    others = [v for v in vals if v != target]
    bound = max(2.0, len(vals) * math.log2(n)) if n > 1 else 2.0
    for p in sieve_upto(bound):
        r = target % p
        if all(v % p != r for v in others):
            return p
    raise LemmaViolation(
        f"no prime <= {bound:.3f} separates {target} from {sorted(others)}"
    )


def _check_kl(K: int, L: int) -> None:
    if K < 2 or L < 1 or L >= K:
        raise ValueError(f"need K >= 2 and 1 <= L < K, got K={K}, L={L}")


def theorem1_bound(K: int, L: int) -> float:
    """Closed-form worst-case round count (L log2 K)^2 / ln(L log2 K) * (1 + 1.2762 / ln(L log2 K))."""
    _check_kl(K, L)
    x = L * math.log2(K)
    if x <= 1:
        raise ValueError(f"L*log2(K) must exceed 1, got {x}")
    return x * dusart_bound(x)


def schedule_length_bound(K: int, L: int) -> int:
    """Exact maximum number of rounds: the sum of every schedule prime."""
    if K < 2 or L < 1:
        raise ValueError(f"need K >= 2 and L >= 1, got K={K}, L={L}")
    return sum(sieve_upto(phase_bound(K, L)))
