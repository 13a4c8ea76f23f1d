import csv
import io
import json
import math

import numpy as np
import pytest

from primedisc.experiments import (
    ExperimentConfig, bound_curve, linear_fit, mix_seed, parse_k_list, render, run_trials,
)
from primedisc.primes import phase_bound, schedule_length_bound


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig((8, 4), 4)
    with pytest.raises(ValueError):
        ExperimentConfig((8,), 3, trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig((8,), 3, erasure_prob=2)
    with pytest.raises(ValueError):
        ExperimentConfig((8,), 3, degree_mode="bogus")
    with pytest.raises(ValueError):
        ExperimentConfig((8,), 3, local_radius=4)
    with pytest.raises(ValueError):
        ExperimentConfig((), 3)


def test_variant_names():
    assert ExperimentConfig((8,), 3).variant == "no-ic"
    assert ExperimentConfig((8,), 3, ic_enabled=True, erasure_prob=0.5).variant == "ic-erasure0.5"
    assert ExperimentConfig((64,), 3, local_radius=2).variant == "no-ic-local2"


def test_mix_seed_stable():
    assert mix_seed(1, 2, 3) == mix_seed(1, 2, 3)
    assert mix_seed(1, 2, 3) != mix_seed(1, 2, 4)
    assert 0 <= mix_seed(0) < 2**63


def test_single_trial_deterministic():
    cfg = ExperimentConfig((64,), 3, trials=1, master_seed=5)
    assert run_trials(cfg).records == run_trials(cfg).records


def test_parallel_matches_serial():
    cfg = ExperimentConfig((16, 64, 256), 5, trials=7, ic_enabled=True, erasure_prob=0.3, master_seed=2)
    serial = run_trials(cfg, workers=1)
    parallel = run_trials(cfg, workers=3)
    assert serial.records == parallel.records
    assert render(serial, "trials") == render(parallel, "trials")


def test_paired_seeds_share_topologies():
    base = dict(k_values=(32, 128), l_value=5, trials=30, master_seed=11)
    no_ic = run_trials(ExperimentConfig(**base))
    ic = run_trials(ExperimentConfig(**base, ic_enabled=True))
    assert [r.seed for r in no_ic.records] == [r.seed for r in ic.records]
    assert all(a.rounds <= b.rounds for a, b in zip(ic.records, no_ic.records))


def test_unpaired_seeds_differ():
    base = dict(k_values=(32,), l_value=5, trials=5, master_seed=11, paired=False)
    a = run_trials(ExperimentConfig(**base))
    b = run_trials(ExperimentConfig(**base, ic_enabled=True))
    assert [r.seed for r in a.records] != [r.seed for r in b.records]


def test_aggregate_invariants():
    cfg = ExperimentConfig((8, 64, 512), 3, trials=40, master_seed=1)
    res = run_trials(cfg)
    for s in res.stats:
        assert s.min_rounds <= s.mean_rounds <= s.max_rounds
        assert sum(s.termination_prime_counts.values()) == s.trials == 40
        assert max(s.termination_prime_counts) <= phase_bound(s.k, 3)
        assert 1 < s.mean_rounds <= schedule_length_bound(s.k, 3)


def test_local_sweep():
    res = run_trials(ExperimentConfig((64, 512), 3, trials=5, local_radius=2))
    assert all(r.completed for r in res.records)
    assert all(r.termination_prime <= phase_bound(6, 5) for r in res.records)


def test_linear_fit_exact_line():
    slope, intercept, r2 = linear_fit([(x, 2 * x + 1) for x in range(5)])
    assert slope == pytest.approx(2) and intercept == pytest.approx(1) and r2 == pytest.approx(1)


def test_linear_fit_constant():
    slope, intercept, r2 = linear_fit([(1, 4), (2, 4), (3, 4)])
    assert slope == 0 and intercept == 4 and r2 == 1


def test_linear_fit_matches_closed_form():
    pts = [(1, 1.0), (2, 3.0), (3, 2.0), (4, 5.0)]
    # hand-computed: xbar 2.5, ybar 2.75, sxy 5.5, sxx 5, ss_res 2.7, ss_tot 8.75
    slope, intercept, r2 = linear_fit(pts)
    assert slope == pytest.approx(1.1)
    assert intercept == pytest.approx(0.0, abs=1e-12)
    assert r2 == pytest.approx(1 - 2.7 / 8.75)
    ref_slope, ref_intercept = np.polyfit([p[0] for p in pts], [p[1] for p in pts], 1)
    assert (slope, intercept) == pytest.approx((ref_slope, ref_intercept), abs=1e-12)


@pytest.mark.parametrize("pts", [[(1, 1), (2, 2)], [(1, 1), (1, 2), (1, 3)]])
def test_linear_fit_rejects(pts):
    with pytest.raises(ValueError):
        linear_fit(pts)


def test_bound_curve():
    ((k, t1, sl),) = bound_curve([8192], 7)
    assert k == 8192 and t1 == pytest.approx(2355.169, abs=1e-3) and sl == 963
    rows = bound_curve([2**e for e in range(3, 14)], 5)
    assert all(a[1] <= b[1] and a[2] <= b[2] for a, b in zip(rows, rows[1:]))


def test_parse_k_list():
    assert parse_k_list("8,16, 32") == [8, 16, 32]
    assert parse_k_list("pow2:3..13") == [2**e for e in range(3, 14)]
    for bad in ("", "pow2:5", "pow2:5..3"):
        with pytest.raises(ValueError):
            parse_k_list(bad)


def test_render_schemas():
    res = run_trials(ExperimentConfig((8, 16), 3, trials=3, erasure_prob=0.5, master_seed=4))
    trials = list(csv.DictReader(io.StringIO(render(res, "trials"))))
    assert list(trials[0]) == [
        "k", "l", "ic", "erasure_prob", "degree_mode", "trial", "seed", "rounds",
        "completed", "termination_phase", "termination_prime", "termination_round",
    ]
    assert len(trials) == 6
    agg = list(csv.DictReader(io.StringIO(render(res, "aggregate"))))
    assert list(agg[0]) == ["k", "l", "variant", "trials", "mean_rounds", "std_rounds", "min_rounds", "max_rounds"]
    hist = list(csv.DictReader(io.StringIO(render(res, "histogram"))))
    assert list(hist[0]) == ["k", "l", "variant", "prime", "count"]
    assert sum(int(h["count"]) for h in hist) == 6
    payload = json.loads(render(res, "aggregate", "json"))
    assert payload["table"] == "aggregate" and "rng" in payload
    assert payload["rows"][0]["variant"] == "no-ic-erasure0.5"
    assert math.isclose(payload["rows"][0]["mean_rounds"], float(agg[0]["mean_rounds"]), rel_tol=1e-6)
