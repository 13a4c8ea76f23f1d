"""Time the compiled discovery kernel against the NumPy fallback.

    python benchmarks/bench_kernels.py --k-list 1024,8192 --l 7 --repeat 20
"""

import argparse
import statistics
import sys
import time

import numpy as np

from primedisc import _backend
from primedisc.experiments import parse_k_list
from primedisc.schedule import build_schedule
from primedisc.topology import generate_random


def time_kernel(kernel, topology, primes, ic, repeat):
    args = (topology.indptr, topology.indices, topology.labels, primes, ic)
    kernel(*args)  # warm-up
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernel(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-list", default="256,1024,8192")
    ap.add_argument("--l", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if "compiled" not in _backend.KERNELS:
        print("compiled kernel not built; timing the fallback only", file=sys.stderr)
    print("k,l,ic," + ",".join(f"{name}_ms" for name in _backend.KERNELS) + ",speedup")
    for k in parse_k_list(args.k_list):
        topology = generate_random(k, args.l, seed=args.seed)
        schedule = build_schedule(k, args.l)
        primes = np.asarray(schedule.primes.primes, dtype=np.int64)
        for ic in (False, True):
            ms = {
                name: 1e3 * time_kernel(fn, topology, primes, ic, args.repeat)
                for name, fn in _backend.KERNELS.items()
            }
            speedup = ms["python"] / ms["compiled"] if "compiled" in ms else float("nan")
            cells = ",".join(f"{v:.3f}" for v in ms.values())
            print(f"{k},{args.l},{str(ic).lower()},{cells},{speedup:.1f}")


if __name__ == "__main__":
    main()
