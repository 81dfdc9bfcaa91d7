"""Time the numba and numpy batch kernels on the same workloads.

Usage: python3 benchmarks/bench_backends.py [--reps R] [--n N]

Both backends draw identical random words, so the script also checks that
they agree before reporting timings.
"""

import argparse
import time

import numpy as np

from lazyleader import rng
from lazyleader._accel import HAVE_NUMBA
from lazyleader.adversaries import AdversarySpec, generate
from lazyleader.baselines import run_baseline_batch
from lazyleader.combinatorial import MSetFamily, default_eta, run_combinatorial_batch
from lazyleader.core import geometric_grid
from lazyleader.rwfpl import run_rwfpl_batch


def workloads(n, reps):
    keys = rng.stream_keys(0, reps)
    grid = geometric_grid(n)
    experts = generate(AdversarySpec("bernoulli", seed=1), n, 10)
    vectors = generate(AdversarySpec("uniform_vectors", seed=2), n, 10, vectors=True)
    dset = MSetFamily(10, 3)
    return {
        "rwfpl N=10": lambda b: run_rwfpl_batch(experts, keys, grid, b),
        "hedge N=10": lambda b: run_baseline_batch("hedge", experts, keys, grid, backend=b),
        "fpl_iid N=10": lambda b: run_baseline_batch("fpl_iid", experts, keys, grid, backend=b),
        "gaussian d=10 m=3": lambda b: run_combinatorial_batch(vectors, dset, default_eta(10), keys, grid, b),
    }


def timed(fn, backend, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--n", type=int, default=2000)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'workload':<20} {'numba s':>9} {'numpy s':>9} {'speedup':>8}  agree")
    for name, fn in workloads(args.n, args.reps).items():
        fn("numba")  # compile outside the timed region
        t_nb, a = timed(fn, "numba")
        t_np, b = timed(fn, "numpy", repeat=1)
        agree = np.array_equal(a.switches, b.switches) and np.allclose(a.cum_loss, b.cum_loss, atol=1e-9)
        print(f"{name:<20} {t_nb:9.3f} {t_np:9.3f} {t_np / t_nb:8.1f}  {agree}")


if __name__ == "__main__":
    main()
