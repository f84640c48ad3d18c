"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times each hot kernel on both backends, reports the median and the
speed-up, and checks that both produce the same numbers.
"""

import argparse
import statistics
import time

import numpy as np

from tulczyjew._backend import get_kernels
from tulczyjew.lie import builtin_algebra


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def cases(A):
    c = np.ascontiguousarray(A.c)
    d = A.dim
    inertia = np.diag(np.arange(1.0, d + 1))
    inv = np.linalg.inv(inertia)
    x0 = np.linspace(0.3, 1.1, d)
    rng = np.random.default_rng(0)
    xs = rng.normal(size=(2000, 2, d))
    return {
        "bracket x2000": lambda K: np.array([K.bracket(c, x, y) for x, y in xs]),
        "ad_star x2000": lambda K: np.array([K.ad_star(c, x, y) for x, y in xs]),
        "expm x2000": lambda K: np.array([K.expm(K.ad_matrix(c, x)) for x, _ in xs]),
        "lie-poisson rk4 10k": lambda K: K.rk4_lie_poisson_quadratic(c, inv, np.zeros(d), x0, 1e-3, 10000),
        "euler-poincare rk4 10k": lambda K: K.rk4_euler_poincare_quadratic(c, inertia, inv, x0, 1e-3, 10000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--algebras", nargs="+", default=["so3", "se3"])
    args = ap.parse_args()
    py = get_kernels("python")
    try:
        compiled = get_kernels("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install --no-build-isolation -e .`")
    print(f"{'algebra':<8} {'kernel':<24} {'python [ms]':>12} {'compiled [ms]':>14} {'speed-up':>9} {'max |diff|':>11}")
    for name in args.algebras:
        for label, fn in cases(builtin_algebra(name)).items():
            tp, a = median_time(lambda: fn(py), args.repeat)
            tc, b = median_time(lambda: fn(compiled), args.repeat)
            diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
            print(f"{name:<8} {label:<24} {1e3 * tp:>12.2f} {1e3 * tc:>14.2f} {tp / tc:>8.1f}x {diff:>11.1e}")


if __name__ == "__main__":
    main()
