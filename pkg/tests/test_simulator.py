import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primedisc import _backend
from primedisc.primes import schedule_length_bound, theorem1_bound
from primedisc.schedule import build_local_schedule, build_schedule, rounds_elapsed
from primedisc.simulator import (
    oracle_no_ic_link_round, run_discovery, run_with_trace, trace_to_csv,
)
from primedisc.topology import Topology, apply_erasures, build_local, generate_random

IDENTITY_2 = Topology.from_neighbors([[1], [2]])
COMPLETE_2 = Topology.from_neighbors([[1, 2], [1, 2]])
K2_SCHEDULE = build_schedule(2, 1)


def test_identity_two_pairs(backend):
    res = run_discovery(IDENTITY_2, K2_SCHEDULE, backend=backend)
    assert res.rounds == 2 and res.completed
    assert (res.termination_phase, res.termination_prime, res.termination_round) == (1, 2, 1)
    assert res.link_discovery_round == {(2, 2): 1, (1, 1): 2}


def test_complete_two_pairs(backend):
    for ic in (False, True):
        res = run_discovery(COMPLETE_2, K2_SCHEDULE, ic, backend=backend)
        assert res.rounds == 2 and res.completed
        assert res.link_discovery_round == {(1, 2): 1, (2, 2): 1, (1, 1): 2, (2, 1): 2}


def test_oracle_hand_cases():
    assert oracle_no_ic_link_round(IDENTITY_2, K2_SCHEDULE, 1, 1) == 2
    assert oracle_no_ic_link_round(COMPLETE_2, K2_SCHEDULE, 2, 2) == 1


def test_oracle_degree_one_receiver():
    top = Topology.from_neighbors([[5], [1, 2], [], [], [3]])
    s = build_schedule(5, 2)
    # first activation of transmitter 5: phase p=2, round 1
    assert oracle_no_ic_link_round(top, s, 1, 5) == 2
    # transmitter 3 in phase p=2 fires in round 1 as well
    assert oracle_no_ic_link_round(top, s, 5, 3) == 2


def test_oracle_rejects_non_link():
    with pytest.raises(ValueError):
        oracle_no_ic_link_round(IDENTITY_2, K2_SCHEDULE, 1, 2)
    with pytest.raises(ValueError):
        oracle_no_ic_link_round(IDENTITY_2, K2_SCHEDULE, 3, 1)


def test_trace_identity():
    res, trace = run_with_trace(IDENTITY_2, K2_SCHEDULE)
    assert len(trace) == 2
    assert [t.discoveries for t in trace] == [((2, 2),), ((1, 1),)]
    assert [t.active for t in trace] == [(2,), (1,)]
    assert res.rounds == 2


def test_trace_csv():
    _, trace = run_with_trace(COMPLETE_2, K2_SCHEDULE)
    lines = trace_to_csv(trace).splitlines()
    assert lines[0] == "cumulative_round,phase,prime,round_in_phase,active_count,discoveries"
    assert lines[1] == "1,1,2,0,1,1:2;2:2"
    assert lines[2] == "2,1,2,1,1,1:1;2:1"


def test_empty_target(backend):
    top = apply_erasures(generate_random(32, 3, seed=0), 1.0, seed=0)
    res = run_discovery(top, build_schedule(32, 3), backend=backend)
    assert res.completed and res.rounds == 0
    assert res.termination_phase is None and res.link_discovery_round == {}
    res_t, trace = run_with_trace(top, build_schedule(32, 3))
    assert trace == [] and res_t.rounds == 0


def test_degree_violation_reports_incomplete(backend):
    # four transmitters heard everywhere, but a schedule sized for L=1 has only p=2
    top = Topology.from_neighbors([[1, 2, 3, 4]] * 4)
    s = build_schedule(4, 1)
    res = run_discovery(top, s, backend=backend)
    assert not res.completed
    assert res.rounds == s.length == 2
    assert (res.termination_phase, res.termination_round) == (1, 1)
    assert res.num_discovered == 0


def test_duplicate_labels_rejected(backend):
    top = Topology.from_neighbors([[1, 2], [2]], labels=[3, 3])
    with pytest.raises(ValueError):
        run_discovery(top, K2_SCHEDULE, backend=backend)
    with pytest.raises(ValueError):
        run_with_trace(top, K2_SCHEDULE)


def test_backends_agree_large():
    if len(_backend.KERNELS) < 2:
        pytest.skip("compiled kernel not built")
    s = build_schedule(4096, 5)
    for seed in range(5):
        top = generate_random(4096, 5, "at-most", seed=seed)
        for ic in (False, True):
            a = run_discovery(top, s, ic, backend="compiled")
            b = run_discovery(top, s, ic, backend="python")
            assert a == b
            assert np.array_equal(a.link_rounds, b.link_rounds)


def small_topologies():
    @st.composite
    def build(draw):
        K = draw(st.integers(2, 24))
        L = draw(st.integers(1, K - 1))
        mode = draw(st.sampled_from(["exact", "at-most"]))
        seed = draw(st.integers(0, 2**32))
        return generate_random(K, L, mode, seed=seed), build_schedule(K, L)

    return build()


@settings(max_examples=200, deadline=None)
@given(small_topologies(), st.booleans())
def test_trace_matches_discovery(case, ic):
    top, s = case
    res = run_discovery(top, s, ic)
    res_t, trace = run_with_trace(top, s, ic)
    assert res == res_t
    events = {d: t.cumulative_round for t in trace for d in t.discoveries}
    assert sum(len(t.discoveries) for t in trace) == len(events)  # no link decoded twice
    assert events == res.link_discovery_round
    assert len(trace) == res.rounds
    for t in trace:
        assert t.active == tuple(j for j in range(1, top.k + 1) if top.label(j) % t.prime == t.round_in_phase)


@settings(max_examples=200, deadline=None)
@given(small_topologies())
def test_oracle_equivalence_no_ic(case):
    top, s = case
    res = run_discovery(top, s, False)
    oracle = {(r, t): oracle_no_ic_link_round(top, s, r, t) for r, t in top.links()}
    assert res.completed
    assert res.link_discovery_round == oracle
    assert res.rounds == max(oracle.values())


@settings(max_examples=200, deadline=None)
@given(small_topologies(), st.floats(0, 1), st.integers(0, 2**32))
def test_dominance_and_bounds(case, p, seed):
    top, s = case
    base = run_discovery(top, s, False)
    ic = run_discovery(top, s, True)
    assert ic.completed and base.completed
    for link, r in base.link_discovery_round.items():
        assert ic.link_discovery_round[link] <= r
    assert ic.rounds <= base.rounds
    thin = apply_erasures(top, p, seed=seed)
    for flag, ref in ((False, base), (True, ic)):
        res = run_discovery(thin, s, flag)
        assert res.completed and res.rounds <= ref.rounds
        for link, r in res.link_discovery_round.items():
            assert r <= ref.link_discovery_round[link]
    K, L = s.num_transmitters, s.connectivity
    for res in (base, ic):
        assert res.rounds <= schedule_length_bound(K, L)
        if L * np.log2(K) > 1:
            assert schedule_length_bound(K, L) <= theorem1_bound(K, L)
        assert res.rounds == rounds_elapsed(s, res.termination_phase, res.termination_round)


@pytest.mark.parametrize("radius", [1, 2, 5])
def test_local_topology_completes(backend, radius):
    top = build_local(300, radius, seed=0)
    s = build_local_schedule(radius)
    for ic in (False, True):
        res = run_discovery(top, s, ic, backend=backend)
        assert res.completed
        assert res.rounds <= s.length
