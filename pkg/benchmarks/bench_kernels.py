"""Time the numba and pure-numpy kernel builds side by side.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once to trigger compilation before timing. The last
column is the numpy time divided by the numba time.
"""

import argparse
import itertools
import timeit

import numpy as np

from sparsear import kernels


def cases():
    rng = np.random.default_rng(0)
    coeffs = np.array([1.2, -0.6, 0.1, 0.05])
    noise = rng.standard_normal(20000)
    x = rng.standard_normal(4096)
    acf = np.array([np.dot(x[: 4096 - k], x[k:]) / 4096 for k in range(11)])
    X = rng.standard_normal((150, 10))
    y = X @ rng.uniform(-0.3, 0.3, 10) + 0.1 * rng.standard_normal(150)
    y[::25] += 5.0
    w = rng.uniform(0.1, 1.0, 150)
    a0 = np.linalg.lstsq(X, y, rcond=None)[0]
    Xs, ys = rng.standard_normal((14, 3)), rng.standard_normal(14)
    subsets = np.array(list(itertools.combinations(range(14), 3)), dtype=np.int64)
    basis = np.arange(10, dtype=np.int64)
    irls_args = (X, y, a0, 0.04, 1e-12, kernels.WEIGHT_POWER, 0.0, 0.25, 2.0, 1e-8, 100, 0.0, False)
    return [
        ("ar_recursion n=20000 p=4", "ar_recursion", (coeffs, noise, np.zeros(4))),
        ("levinson p=10", "levinson", (acf, 10)),
        ("weighted_lstsq 150x10", "weighted_lstsq", (X, y, w, 0.0)),
        ("irls 150x10", "irls", irls_args),
        ("l0_scan 14x3 (364 subsets)", "l0_scan", (Xs, ys, subsets, 0.1)),
        ("l1_exchange 150x10", "l1_exchange", (X, y, basis, 1000)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; only the numpy build can be timed")
    print(f"{'kernel':<30}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for label, name, kargs in cases():
        py = getattr(kernels, name + "_py")
        jit = getattr(kernels, name + "_jit")
        number = 3
        t_py = min(timeit.repeat(lambda: py(*kargs), number=number, repeat=args.repeat)) / number
        if jit is None:
            print(f"{label:<30}{1e3 * t_py:>12.3f}{'-':>12}{'-':>10}")
            continue
        jit(*kargs)
        t_jit = min(timeit.repeat(lambda: jit(*kargs), number=number, repeat=args.repeat)) / number
        print(f"{label:<30}{1e3 * t_py:>12.3f}{1e3 * t_jit:>12.3f}{t_py / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
