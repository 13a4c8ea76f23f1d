"""Round-by-round discovery on a topology under a prime-phase schedule.

A receiver decodes a transmitter in a round when that transmitter's link
is the only effective active link at the receiver.  Without interference
cancellation (IC) every active neighbor counts; with IC the receiver first
subtracts neighbors it has already decoded.  Termination is checked after
every round against the full link set of the topology.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _backend, _fallback
from .schedule import Schedule, rounds_elapsed
from .topology import Topology


@dataclass(frozen=True)
class SimResult:
    rounds: int
    termination_phase: int | None
    termination_prime: int | None
    termination_round: int | None
    completed: bool
    topology: Topology = field(repr=False, compare=False)
    link_rounds: np.ndarray = field(repr=False, compare=False)

    @cached_property
    def link_discovery_round(self) -> dict[tuple[int, int], int]:
        """(receiver, transmitter) -> cumulative round, for decoded links only."""
        return {
            link: int(r)
            for link, r in zip(self.topology.links(), self.link_rounds.tolist())
            if r > 0
        }

    @property
    def num_discovered(self) -> int:
        return int(np.count_nonzero(self.link_rounds))


@dataclass(frozen=True)
class TraceRound:
    cumulative_round: int
    phase: int
    prime: int
    round_in_phase: int
    active: tuple[int, ...]
    discoveries: tuple[tuple[int, int], ...]


def _check_labels(topology: Topology) -> None:
    bad = topology.duplicate_label_receivers()
    if bad:
        raise ValueError(
            f"receivers {bad[:5]} hear transmitters sharing a label; "
            "labels must be pairwise distinct per receiver"
        )


def _primes_array(schedule: Schedule) -> np.ndarray:
    return np.asarray(schedule.primes.primes, dtype=np.int64)


def _result(topology, schedule, out) -> SimResult:
    link_round, phase, rnd, rounds, completed = out
    if phase == 0:
        return SimResult(0, None, None, None, True, topology, link_round)
    assert rounds == rounds_elapsed(schedule, phase, rnd)
    return SimResult(rounds, phase, schedule.prime(phase), rnd, completed, topology, link_round)


def run_discovery(topology: Topology, schedule: Schedule, ic_enabled: bool = False,
                  backend: str | None = None) -> SimResult:
    _check_labels(topology)
    kernel = _backend.KERNELS[backend] if backend else _backend.discover
    out = kernel(topology.indptr, topology.indices, topology.labels, _primes_array(schedule), bool(ic_enabled))
    return _result(topology, schedule, out)


def run_with_trace(topology: Topology, schedule: Schedule, ic_enabled: bool = False):
    """``run_discovery`` plus one ``TraceRound`` per executed round."""
    _check_labels(topology)
    raw = []
    out = _fallback.discover(
        topology.indptr, topology.indices, topology.labels, _primes_array(schedule), bool(ic_enabled),
        trace=raw,
    )
    rx = topology.receiver_of_link()
    tx = topology.indices
    labels = topology.labels
    transmitters = np.arange(1, topology.k + 1)
    trace = [
        TraceRound(
            cumulative_round=cum,
            phase=m,
            prime=p,
            round_in_phase=i,
            active=tuple(transmitters[labels % p == i].tolist()),
            discoveries=tuple(zip(rx[new].tolist(), tx[new].tolist())),
        )
        for m, p, i, cum, new in raw
    ]
    return _result(topology, schedule, out), trace


def trace_to_csv(trace: list[TraceRound]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cumulative_round", "phase", "prime", "round_in_phase", "active_count", "discoveries"])
    for t in trace:
        w.writerow([
            t.cumulative_round, t.phase, t.prime, t.round_in_phase, len(t.active),
            ";".join(f"{r}:{x}" for r, x in t.discoveries),
        ])
    return buf.getvalue()


def oracle_no_ic_link_round(topology: Topology, schedule: Schedule, receiver: int,
                            transmitter: int) -> int:
    """First cumulative round at which the link is isolated, read off residues alone.

    Without IC a link can only be decoded in its transmitter's active round
    of a phase whose prime separates its label from every other neighbor
    label of the receiver.  Returns the schedule length plus one when no
    phase isolates the link.
    """
    if not 1 <= receiver <= topology.k or not topology.has_link(receiver, transmitter):
        raise ValueError(f"({receiver}, {transmitter}) is not a link of the topology")
    own = topology.label(transmitter)
    others = [topology.label(t) for t in topology.neighbors(receiver) if t != transmitter]
    elapsed = 0
    for p in schedule.primes:
        if all(o % p != own % p for o in others):
            return elapsed + own % p + 1
        elapsed += p
    return elapsed + 1
