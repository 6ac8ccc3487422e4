"""Time the type-class kernels with numba and with the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 60 120 200 --alphabet 3 --repeat 3

The backend is switched in-process through ``chanquery._accel.USE_NUMBA``;
running the whole package with ``CHANQUERY_NO_NUMBA=1`` has the same effect
as the numpy column here.
"""

import argparse
import time

import numpy as np

from chanquery import _accel, kernels
from chanquery.channels import make_rng
from chanquery.oracle import classical_error_exact, classical_mary_pgm_error


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[40, 80, 160])
    ap.add_argument("--alphabet", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = make_rng(args.seed)
    k = args.alphabet
    t, r, u = (rng.dirichlet(np.ones(k)) for _ in range(3))
    tasks = {
        "binary error": lambda n: classical_error_exact(0.5, t, r, n),
        "3-ary PGM error": lambda n: classical_mary_pgm_error([1 / 3] * 3, [t, r, u], n),
    }
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy column is meaningful")

    # compile once so the numba column measures steady-state time
    _accel.USE_NUMBA = _accel.HAVE_NUMBA
    for fn in tasks.values():
        fn(2)

    print(f"{'task':<16} {'n':>5} {'types':>10} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, fn in tasks.items():
        for n in args.n:
            _accel.USE_NUMBA = _accel.HAVE_NUMBA
            fast = best_of(lambda: fn(n), args.repeat)
            _accel.USE_NUMBA = False
            slow = best_of(lambda: fn(n), args.repeat)
            types = kernels.n_compositions(n, k)
            print(f"{name:<16} {n:>5} {types:>10} {fast:>10.4f} {slow:>10.4f} {slow / fast:>8.2f}")


if __name__ == "__main__":
    main()
