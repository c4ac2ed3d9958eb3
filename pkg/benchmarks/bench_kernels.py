"""Compare the compiled and numpy kernels on workloads of realistic size.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import time

import numpy as np

from fourier_lorentz import _pykernels
from fourier_lorentz.fourier import DEFAULT_RESOLUTION

try:
    from fourier_lorentz import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; nothing to compare")
        return

    edges = DEFAULT_RESOLUTION.edges()
    cases = [
        ("sinc_sum_bounds, 1 term", (edges, [1.0], [1.26]), "sinc_sum_bounds"),
        ("sinc_sum_bounds, 4 terms", (edges, [1.0, 7.9e6, 1.4e15, 5.9e24], [1.26, -0.3, 0.2, 1e-8]), "sinc_sum_bounds"),
    ]
    rng = np.random.default_rng(0)
    n = 10 ** 6
    bps = np.concatenate([[0.0], np.cumsum(rng.uniform(0, 1e-3, n))])
    vals = np.sort(rng.uniform(0, 2, n))[::-1]
    cases.append(("step_power_integral, 1e6 steps", (bps, vals, 0.5, 1.5), "step_power_integral"))

    print(f"{'kernel':34s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for label, a, name in cases:
        tp, rp = best_of(lambda: getattr(_pykernels, name)(*a), args.repeat)
        tc, rc = best_of(lambda: getattr(_ckernels, name)(*a), args.repeat)
        if isinstance(rp, tuple):
            diff = max(float(np.max(np.abs(x - y) / np.maximum(np.abs(x), 1e-300))) for x, y in zip(rp, rc))
        else:
            diff = abs(rp - rc) / abs(rp)
        print(f"{label:34s} {tp * 1e3:11.2f} {tc * 1e3:12.2f} {tp / tc:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
