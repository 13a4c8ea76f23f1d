"""Command-line entry point: ``primedisc {simulate,sweep,schedule,bound,verify}``.

Output goes to stdout unless ``--output`` is given; files are written to a
temporary sibling and renamed into place, so an error never leaves a
partial artifact behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__, _backend
from .experiments import (
    TABLES, ExperimentConfig, bound_curve, mix_seed, parse_k_list, render, run_trials,
)
from .primes import (
    LemmaViolation, dusart_bound, find_distinguishing_prime, is_prime_trial_division,
    prime_count_table, sieve_upto,
)
from .schedule import active_set, build_local_schedule, build_schedule
from .simulator import run_discovery, run_with_trace, trace_to_csv
from .topology import DEGREE_MODES, apply_erasures, build_local, generate_random


class CliError(Exception):
    pass


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".primedisc-")
    except OSError as exc:
        raise CliError(f"cannot write to {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _table(columns, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def cmd_simulate(args) -> int:
    if args.local_radius is not None:
        topology = build_local(args.k, args.local_radius, seed=args.seed)
        schedule = build_local_schedule(args.local_radius)
    else:
        topology = generate_random(args.k, args.l, args.degree_mode, seed=args.seed)
        schedule = build_schedule(args.k, args.l)
    if args.erasure_prob > 0:
        topology = apply_erasures(topology, args.erasure_prob, seed=mix_seed(args.seed, 1))
    if args.trace:
        res, trace = run_with_trace(topology, schedule, args.ic)
        if args.format == "json":
            text = json.dumps([
                {
                    "cumulative_round": t.cumulative_round, "phase": t.phase, "prime": t.prime,
                    "round_in_phase": t.round_in_phase, "active_count": len(t.active),
                    "discoveries": [list(d) for d in t.discoveries],
                }
                for t in trace
            ], indent=2) + "\n"
        else:
            text = trace_to_csv(trace)
        print(f"rounds={res.rounds} completed={res.completed}", file=sys.stderr)
    else:
        res = run_discovery(topology, schedule, args.ic)
        columns = [
            "k", "l", "ic", "erasure_prob", "degree_mode", "local_radius", "seed", "links",
            "rounds", "completed", "termination_phase", "termination_prime", "termination_round",
        ]
        row = [
            args.k, args.l, args.ic, args.erasure_prob, args.degree_mode, args.local_radius,
            args.seed, topology.num_links, res.rounds, res.completed, res.termination_phase,
            res.termination_prime, res.termination_round,
        ]
        if args.format == "json":
            text = json.dumps(dict(zip(columns, row)), indent=2) + "\n"
        else:
            text = _table(columns, [[_cell(v) for v in row]], "csv")
    _write(text, args.output)
    return 0


def cmd_sweep(args) -> int:
    config = ExperimentConfig(
        k_values=tuple(parse_k_list(args.k_list)), l_value=args.l, trials=args.trials,
        ic_enabled=args.ic, erasure_prob=args.erasure_prob, degree_mode=args.degree_mode,
        local_radius=args.local_radius, master_seed=args.seed, paired=not args.unpaired,
    )
    result = run_trials(config, workers=args.workers)
    if args.output_dir:
        if not os.path.isdir(args.output_dir):
            raise CliError(f"output directory {args.output_dir} does not exist")
        # Render everything first so a failure writes nothing.
        texts = {t: render(result, t, args.format) for t in TABLES}
        for table, text in texts.items():
            _write(text, os.path.join(args.output_dir, f"{table}.{args.format}"))
    else:
        _write(render(result, args.table, args.format), args.output)
    return 0


def cmd_schedule(args) -> int:
    if args.local_radius is not None:
        schedule = build_local_schedule(args.local_radius)
    else:
        schedule = build_schedule(args.k, args.l)
    rows = []
    for m, p in enumerate(schedule.primes, start=1):
        for i in range(p):
            active = sorted(active_set(schedule, m, i))
            rows.append([m, p, i, ";".join(map(str, active))])
    columns = ["phase_index", "prime", "round", "active_transmitters"]
    _write(_table(columns, rows, args.format), args.output)
    return 0


def cmd_bound(args) -> int:
    k_values = parse_k_list(args.k_list) if args.k_list else [args.k]
    rows = [[k, args.l, round(t1, 4), sl] for k, t1, sl in bound_curve(k_values, args.l)]
    columns = ["k", "l", "theorem1_bound", "schedule_length_bound"]
    _write(_table(columns, rows, args.format), args.output)
    return 0


def verify_prime_count(max_x: int) -> tuple[int, int]:
    xs = np.arange(2, max_x + 1)
    counts = prime_count_table(max_x)[2:]
    ok = counts <= dusart_bound(xs.astype(float))
    return int(ok.sum()), int((~ok).sum())


def verify_sieve(max_x: int) -> tuple[int, int]:
    sieved = set(sieve_upto(max_x))
    bad = sum(1 for n in range(2, max_x + 1) if (n in sieved) != is_prime_trial_division(n))
    return max_x - 1 - bad, bad


def verify_distinguishing(instances: int, seed: int, max_size: int = 10, n: int = 2**13):
    rng = np.random.default_rng(seed)
    passed = failed = 0
    for _ in range(instances):
        s = int(rng.integers(1, max_size + 1))
        values = rng.choice(np.arange(1, n + 1), size=s, replace=False).tolist()
        for target in values:
            try:
                find_distinguishing_prime(values, target, n)
            except LemmaViolation:
                failed += 1
            else:
                passed += 1
    return passed, failed


def cmd_verify(args) -> int:
    checks = [
        ("prime_count_le_bound", verify_prime_count(args.max_x)),
        ("sieve_matches_trial_division", verify_sieve(args.sieve_max)),
        ("distinguishing_prime_exists", verify_distinguishing(args.instances, args.seed)),
    ]
    rows = [[name, p, f, "pass" if f == 0 else "fail"] for name, (p, f) in checks]
    _write(_table(["check", "passed", "failed", "status"], rows, args.format), args.output)
    return 0 if all(f == 0 for _, (_, f) in checks) else 1


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a probability in [0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primedisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({_backend.BACKEND} kernel)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")

    def network(p):
        p.add_argument("--ic", action="store_true", help="enable interference cancellation")
        p.add_argument("--erasure-prob", type=_probability, default=0.0)
        p.add_argument("--degree-mode", choices=DEGREE_MODES, default="exact")
        p.add_argument("--local-radius", type=_positive_int, default=None)

    p = sub.add_parser("simulate", help="run discovery on one random topology")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="emit the per-round trace instead of the summary")
    network(p)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over K")
    p.add_argument("--k-list", required=True, help="e.g. 8,16,32 or pow2:3..13")
    p.add_argument("--l", type=_positive_int, required=True)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--unpaired", action="store_true", help="do not share topologies across variants")
    p.add_argument("--table", choices=tuple(TABLES), default="aggregate")
    p.add_argument("--output-dir", default=None, help="write all three tables into this directory")
    network(p)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("schedule", help="print the phase/round activation table")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--l", type=_positive_int, default=None)
    p.add_argument("--local-radius", type=_positive_int, default=None)
    common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("bound", help="tabulate the worst-case round bounds")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--k-list", default=None)
    p.add_argument("--l", type=_positive_int, required=True)
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="check the number-theoretic facts the schedule relies on")
    p.add_argument("--max-x", type=int, default=10**6)
    p.add_argument("--sieve-max", type=int, default=10**5)
    p.add_argument("--instances", type=_positive_int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def _validate(args) -> None:
    if args.command == "schedule":
        if args.local_radius is None and (args.k is None or args.l is None):
            raise CliError("schedule needs --k and --l, or --local-radius")
    if args.command == "bound" and (args.k is None) == (args.k_list is None):
        raise CliError("bound needs exactly one of --k or --k-list")
    if args.command == "verify" and (args.max_x < 2 or args.sieve_max < 2):
        raise CliError("--max-x and --sieve-max must be >= 2")
    if getattr(args, "seed", 0) < 0:
        raise CliError("--seed must be non-negative")
    if args.command == "simulate" and args.local_radius is None and not 1 <= args.l < args.k:
        raise CliError(f"need 1 <= L < K, got K={args.k}, L={args.l}")
    if args.command == "sweep" and args.output_dir and args.output:
        raise CliError("--output and --output-dir are mutually exclusive")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"primedisc {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
