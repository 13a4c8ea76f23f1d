"""Prime-phase transmission schedule.

Phase ``m`` (1-based) uses the m-th prime ``p`` of the schedule and lasts
``p`` rounds; a transmitter whose label is ``j`` transmits in round
``j mod p`` of that phase and stays silent otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .primes import PrimeList, phase_bound, sieve_upto


@dataclass(frozen=True)
class Schedule:
    primes: PrimeList
    num_transmitters: int
    connectivity: int

    @property
    def num_phases(self) -> int:
        return len(self.primes)

    @property
    def length(self) -> int:
        """Rounds consumed when every phase runs to its end."""
        return sum(self.primes)

    def prime(self, phase: int) -> int:
        self._check_phase(phase)
        return self.primes[phase - 1]

    def phase_offsets(self) -> tuple[int, ...]:
        """Rounds elapsed before each phase starts."""
        return tuple(accumulate(self.primes, initial=0))[:-1]

    def residue(self, phase: int, label: int) -> int:
        return label % self.prime(phase)

    def residues(self, labels=None) -> np.ndarray:
        """(num_phases, len(labels)) residue table; identity labels 1..K by default."""
        if labels is None:
            labels = np.arange(1, self.num_transmitters + 1)
        labels = np.asarray(labels, dtype=np.int64)
        return labels[None, :] % np.asarray(self.primes.primes, dtype=np.int64)[:, None]

    def _check_phase(self, phase: int) -> None:
        if not 1 <= phase <= self.num_phases:
            raise ValueError(f"phase {phase} outside [1, {self.num_phases}]")


def build_schedule(K: int, L: int) -> Schedule:
    if K < 2 or L < 1 or L >= K:
        raise ValueError(f"need K >= 2 and 1 <= L < K, got K={K}, L={L}")
    return Schedule(sieve_upto(phase_bound(K, L)), K, L)


def build_local_schedule(radius: int) -> Schedule:
    """Schedule over the remapped label universe of a radius-limited network.

    Labels live in [1, 2r+2] and a receiver hears at most 2r+1 of them, so
    the prime set is the one for 2r+2 transmitters of degree 2r+1.
    """
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    return build_schedule(2 * radius + 2, 2 * radius + 1)


def active_set(schedule: Schedule, phase: int, round: int, labels=None) -> set[int]:
    """Transmitters whose label is congruent to ``round`` modulo the phase prime.

    ``labels`` maps transmitter index to label: a dict, or a sequence where
    entry ``t-1`` is the label of transmitter ``t``.  Defaults to identity
    labels over the schedule's transmitters.
    """
    p = schedule.prime(phase)
    if not 0 <= round < p:
        raise ValueError(f"round {round} outside [0, {p - 1}] for phase {phase}")
    if labels is None:
        items = ((t, t) for t in range(1, schedule.num_transmitters + 1))
    elif isinstance(labels, dict):
        items = labels.items()
    else:
        items = ((t, int(lab)) for t, lab in enumerate(labels, start=1))
    return {t for t, lab in items if lab % p == round}


def rounds_elapsed(schedule: Schedule, termination_phase: int, termination_round: int) -> int:
    p = schedule.prime(termination_phase)
    if not 0 <= termination_round < p:
        raise ValueError(f"round {termination_round} outside [0, {p - 1}]")
    return sum(schedule.primes[: termination_phase - 1]) + termination_round + 1
