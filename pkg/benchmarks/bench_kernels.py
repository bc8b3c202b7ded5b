"""Time each kernel under both backends.

    python benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Numba timings exclude compilation (one warm-up call per kernel).
"""

import argparse
import timeit

import numpy as np

from fxtail import kernels
from fxtail.synthetic import gen_student_t, GeneratorSpec, make_rng


def _inputs(n: int):
    rng = make_rng(0)
    x = gen_student_t(GeneratorSpec("student_t", 3.0, n), rng)
    logs = np.log(np.sort(np.abs(x))[::-1] + 1e-12)
    ts = np.cumsum(1 + (rng.random(n) * 400).astype(np.int64))
    is_bid = rng.random(n) < 0.5
    price = 1.75 + 1e-4 * x
    endpoints = np.arange(ts[0] + 2000, ts[-1], 2000, dtype=np.int64)
    return {
        "hill_spectrum": (logs, 2, n // 2),
        "acf": (x, 100),
        "ks_normal": (np.sort(x), float(x.mean()), float(x.std(ddof=1))),
        "sample_quotes": (ts, is_bid, price, endpoints),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    inputs = _inputs(args.n)
    print(f"n={args.n}  best of {args.repeat}")
    print(f"{'kernel':<15}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (np_fn, nb_fn) in kernels.IMPLEMENTATIONS.items():
        a = inputs[name]
        t_np = min(timeit.repeat(lambda: np_fn(*a), number=1, repeat=args.repeat))
        if nb_fn is None:
            print(f"{name:<15}{t_np * 1e3:>12.2f}{'n/a':>12}{'':>10}")
            continue
        nb_fn(*a)
        t_nb = min(timeit.repeat(lambda: nb_fn(*a), number=1, repeat=args.repeat))
        print(f"{name:<15}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
