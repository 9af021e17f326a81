"""Benchmark the pure-numpy and numba classification backends.

Measures raw classifier throughput and one end-to-end fractional-length run
under each backend, by toggling the FRACLEN_BACKEND environment variable
(read at call time, so no subprocesses are needed).

Usage: python3 benchmarks/bench_backends.py [--discs N] [--samples N] [--repeat K]
"""

import argparse
import math
import os
import time

import numpy as np

from fraclen import Window, len_sigma, make_curve
from fraclen.discs import classify_batch
from fraclen.geometry import sample_perp_pair, stream_rng


def make_discs(curve, k, seed):
    rng = stream_rng(seed, 0)
    s = curve.s0 + (curve.s1 - curve.s0) * rng.random(k)
    a, b = sample_perp_pair(curve.dim, rng, size=k)
    xi = 0.05 + 2.0 * rng.random(k)
    r = xi * (1.0 + rng.random(k))
    return curve.point(s) + xi[:, None] * a, b, r


def time_call(fn, repeat):
    best = math.inf
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--discs", type=int, default=200_000)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    circle = make_curve(
        {
            "kind": "circle_arc",
            "dimension": 3,
            "center": [0, 0, 0],
            "axis1": [1, 0, 0],
            "axis2": [0, 1, 0],
            "radius": 1,
            "angle_start": 0.0,
            "angle_end": 2.0 * math.pi,
        }
    )
    window = Window(center=np.zeros(3), radius=2.0)
    P, U, R = make_discs(circle, args.discs, 1)

    rows = []
    for backend in ("numpy", "numba"):
        os.environ["FRACLEN_BACKEND"] = backend
        # Warm-up (numba compiles on first call) outside the timed region.
        classify_batch(circle, P[:256], U[:256], R[:256], grid=512)

        t_cls, out = time_call(
            lambda: classify_batch(circle, P, U, R, grid=2048), args.repeat
        )
        t_len, res = time_call(
            lambda: len_sigma(circle, window, 0.7, args.samples, 7), args.repeat
        )
        rows.append((backend, t_cls, args.discs / t_cls, t_len, res.estimate))

    print(f"{'backend':8s} {'classify[s]':>12s} {'discs/s':>12s} {'len_sigma[s]':>13s} {'estimate':>12s}")
    for backend, t_cls, rate, t_len, est in rows:
        print(f"{backend:8s} {t_cls:12.3f} {rate:12.0f} {t_len:13.3f} {est:12.4f}")
    if len(rows) == 2 and rows[1][1] > 0:
        print(f"numba speedup: classify {rows[0][1] / rows[1][1]:.2f}x, "
              f"len_sigma {rows[0][3] / rows[1][3]:.2f}x")
        if rows[0][4] != rows[1][4]:
            print("note: backends round differently in the last ulp; "
                  f"estimates differ by {abs(rows[0][4] - rows[1][4]):.3e}")


if __name__ == "__main__":
    main()
