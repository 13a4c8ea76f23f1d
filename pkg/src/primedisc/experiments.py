"""Monte Carlo sweeps over network size, with CSV/JSON emitters.

Trial seeds are derived as ``mix_seed(master_seed, K, trial)``, so runs that
differ only in the IC flag or erasure probability see the same base
topologies (paired comparison).  With ``paired=False`` the variant name is
mixed in as well.  Within a trial, the topology uses the trial seed and the
erasure pattern uses ``mix_seed(trial_seed, 1)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .primes import phase_bound, schedule_length_bound, theorem1_bound
from .schedule import build_local_schedule, build_schedule
from .simulator import run_discovery
from .topology import DEGREE_MODES, apply_erasures, build_local, generate_random

RNG_NAME = "numpy.random.PCG64 (default_rng)"

TRIAL_COLUMNS = [
    "k", "l", "ic", "erasure_prob", "degree_mode", "trial", "seed", "rounds",
    "completed", "termination_phase", "termination_prime", "termination_round",
]
AGGREGATE_COLUMNS = ["k", "l", "variant", "trials", "mean_rounds", "std_rounds", "min_rounds", "max_rounds"]
HISTOGRAM_COLUMNS = ["k", "l", "variant", "prime", "count"]


def mix_seed(*parts: int) -> int:
    """Deterministic 63-bit seed from a tuple of non-negative integers."""
    state = np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


@dataclass(frozen=True)
class ExperimentConfig:
    k_values: tuple[int, ...]
    l_value: int
    trials: int = 100
    ic_enabled: bool = False
    erasure_prob: float = 0.0
    degree_mode: str = "exact"
    local_radius: int | None = None
    master_seed: int = 0
    paired: bool = True

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        self.validate()

    def validate(self) -> None:
        if not self.k_values:
            raise ValueError("k_values must not be empty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.l_value < 1:
            raise ValueError(f"L must be >= 1, got {self.l_value}")
        for k in self.k_values:
            if k < 2 or self.l_value >= k:
                raise ValueError(f"need 2 <= K and L < K, got K={k}, L={self.l_value}")
            if self.local_radius is not None and 2 * self.local_radius + 1 > k:
                raise ValueError(f"local radius {self.local_radius} too large for K={k}")
        if not 0.0 <= self.erasure_prob <= 1.0:
            raise ValueError(f"erasure_prob must lie in [0, 1], got {self.erasure_prob}")
        if self.degree_mode not in DEGREE_MODES:
            raise ValueError(f"degree_mode must be one of {DEGREE_MODES}")
        if self.local_radius is not None and self.local_radius < 1:
            raise ValueError("local_radius must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    @property
    def variant(self) -> str:
        name = "ic" if self.ic_enabled else "no-ic"
        if self.erasure_prob > 0:
            name += f"-erasure{self.erasure_prob:g}"
        if self.local_radius is not None:
            name += f"-local{self.local_radius}"
        return name

    def trial_seed(self, k: int, trial: int) -> int:
        if self.paired:
            return mix_seed(self.master_seed, k, trial)
        return mix_seed(self.master_seed, k, trial, zlib.crc32(self.variant.encode()))

    def schedule_bound(self, k: int) -> float:
        """Largest prime the schedule for this K may contain."""
        if self.local_radius is not None:
            r = self.local_radius
            return phase_bound(2 * r + 2, 2 * r + 1)
        return phase_bound(k, self.l_value)


@dataclass(frozen=True)
class TrialRecord:
    k: int
    l: int
    ic: bool
    erasure_prob: float
    degree_mode: str
    trial: int
    seed: int
    rounds: int
    completed: bool
    termination_phase: int | None
    termination_prime: int | None
    termination_round: int | None


@dataclass
class AggregateStats:
    k: int
    l: int
    variant: str
    trials: int
    mean_rounds: float
    std_rounds: float
    min_rounds: int
    max_rounds: int
    termination_prime_counts: dict[int, int] = field(default_factory=dict)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    stats: list[AggregateStats]

    def stats_for(self, k: int) -> AggregateStats:
        return next(s for s in self.stats if s.k == k)

    def rounds(self, k: int) -> np.ndarray:
        return np.array([r.rounds for r in self.records if r.k == k])


def run_single_trial(config: ExperimentConfig, k: int, trial: int) -> TrialRecord:
    seed = config.trial_seed(k, trial)
    if config.local_radius is not None:
        topology = build_local(k, config.local_radius, seed=seed)
        schedule = build_local_schedule(config.local_radius)
    else:
        topology = generate_random(k, config.l_value, config.degree_mode, seed=seed)
        schedule = build_schedule(k, config.l_value)
    if config.erasure_prob > 0:
        topology = apply_erasures(topology, config.erasure_prob, seed=mix_seed(seed, 1))
    res = run_discovery(topology, schedule, config.ic_enabled)
    return TrialRecord(
        k=k, l=config.l_value, ic=config.ic_enabled, erasure_prob=config.erasure_prob,
        degree_mode=config.degree_mode, trial=trial, seed=seed, rounds=res.rounds,
        completed=res.completed, termination_phase=res.termination_phase,
        termination_prime=res.termination_prime, termination_round=res.termination_round,
    )


def _run_chunk(args):
    config, k, trials = args
    return [run_single_trial(config, k, t) for t in trials]


def aggregate(config: ExperimentConfig, records: list[TrialRecord]) -> list[AggregateStats]:
    by_k: dict[int, list[TrialRecord]] = {}
    for rec in records:
        by_k.setdefault(rec.k, []).append(rec)
    stats = []
    for k in sorted(by_k):
        rounds = np.array([r.rounds for r in by_k[k]], dtype=float)
        primes = Counter(r.termination_prime for r in by_k[k] if r.termination_prime is not None)
        stats.append(AggregateStats(
            k=k, l=config.l_value, variant=config.variant, trials=len(rounds),
            mean_rounds=float(rounds.mean()),
            std_rounds=float(rounds.std(ddof=1)) if rounds.size > 1 else 0.0,
            min_rounds=int(rounds.min()), max_rounds=int(rounds.max()),
            termination_prime_counts=dict(sorted(primes.items())),
        ))
    return stats


def run_trials(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    config.validate()
    if workers < 1:
        raise ValueError("workers must be >= 1")
    chunks = []
    for k in config.k_values:
        step = max(1, math.ceil(config.trials / workers))
        for lo in range(0, config.trials, step):
            chunks.append((config, k, range(lo, min(lo + step, config.trials))))
    if workers == 1:
        parts = map(_run_chunk, chunks)
        records = [r for part in parts for r in part]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for part in pool.map(_run_chunk, chunks) for r in part]
    records.sort(key=lambda r: (r.k, r.trial))
    return ExperimentResult(config, records, aggregate(config, records))


def linear_fit(points) -> tuple[float, float, float]:
    """OLS fit y = slope*x + intercept; r^2 is 1 for constant y by convention."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise ValueError("linear_fit needs at least 3 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0:
        raise ValueError("x values must not all be equal")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0:
        return slope, intercept, 1.0
    ss_res = float(((y - (slope * x + intercept)) ** 2).sum())
    return slope, intercept, 1.0 - ss_res / ss_tot


def bound_curve(k_values, L: int) -> list[tuple[int, float, int]]:
    return [(int(k), theorem1_bound(k, L), schedule_length_bound(k, L)) for k in k_values]


def parse_k_list(text: str) -> list[int]:
    """``8,16,32`` or ``pow2:3..13``."""
    text = text.strip()
    if text.startswith("pow2:"):
        lo, sep, hi = text[5:].partition("..")
        if not sep:
            raise ValueError(f"expected pow2:A..B, got {text!r}")
        lo, hi = int(lo), int(hi)
        if lo < 1 or hi < lo:
            raise ValueError(f"bad exponent range in {text!r}")
        return [2**e for e in range(lo, hi + 1)]
    values = [int(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("empty K list")
    return values


# -- emitters ---------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(round(v, 6))
    return v


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def trial_rows(result: ExperimentResult) -> list[dict]:
    return [asdict(r) for r in result.records]


def aggregate_rows(result: ExperimentResult) -> list[dict]:
    return [{c: getattr(s, c) for c in AGGREGATE_COLUMNS} for s in result.stats]


def histogram_rows(result: ExperimentResult) -> list[dict]:
    return [
        {"k": s.k, "l": s.l, "variant": s.variant, "prime": p, "count": n}
        for s in result.stats
        for p, n in s.termination_prime_counts.items()
    ]


TABLES = {
    "trials": (TRIAL_COLUMNS, trial_rows),
    "aggregate": (AGGREGATE_COLUMNS, aggregate_rows),
    "histogram": (HISTOGRAM_COLUMNS, histogram_rows),
}


def render(result: ExperimentResult, table: str, fmt: str = "csv") -> str:
    columns, rows_fn = TABLES[table]
    rows = rows_fn(result)
    if fmt == "csv":
        return _csv(columns, rows)
    payload = {
        "table": table,
        "rng": RNG_NAME,
        "master_seed": result.config.master_seed,
        "paired": result.config.paired,
        "rows": [{c: row[c] for c in columns} for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"
