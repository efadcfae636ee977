#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Usage: python benchmarks/kernel_benchmark.py [--repeats N]

Each kernel runs on a representative workload; the table reports the best
wall time of N runs per implementation and the speedup. Results are also
cross-checked for agreement so the benchmark doubles as a consistency probe.
"""

import argparse
import time

import numpy as np

from cellbench._kernels import _fallback

try:
    from cellbench._kernels import _core
except ImportError:
    _core = None


def _best_time(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def _workloads():
    rng = np.random.default_rng(0)

    a = rng.integers(0, 2000, (1536, 1536))
    b = rng.integers(0, 2000, (1536, 1536))
    yield "label_overlap (1536^2, 2k labels)", lambda impl: impl.label_overlap(a, b), "exact"

    blobs = np.zeros((1024, 1024), np.int64)
    yy, xx = np.mgrid[0:1024, 0:1024]
    for k in range(1, 400):
        cy, cx = rng.integers(10, 1014, 2)
        r = rng.integers(4, 14)
        blobs[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = k
    yield "connected_components_4 (1024^2)", lambda impl: impl.connected_components_4(blobs)[0], "exact"

    mask = np.zeros((98, 98), bool)
    myy, mxx = np.mgrid[0:98, 0:98]
    mask[(myy - 49) ** 2 + (mxx - 49) ** 2 <= 45**2] = True
    yield "heat_diffusion (r=45 disk, 400 it)", lambda impl: impl.heat_diffusion(mask, 49, 49, 400), "exact"

    fy = rng.normal(size=(512, 512))
    fx = rng.normal(size=(512, 512))
    ys = rng.random(200_000) * 511
    xs = rng.random(200_000) * 511
    yield "flow_advect (200k px, 200 it)", lambda impl: impl.flow_advect(fy, fx, ys, xs, 200)[0], "exact"

    elev = rng.normal(size=(512, 512))
    fg = rng.random((512, 512)) > 0.2
    markers = np.zeros((512, 512), np.int32)
    mys, mxs = np.nonzero(fg)
    for i, k in enumerate(rng.choice(mys.size, 50, replace=False)):
        markers[mys[k], mxs[k]] = i + 1
    yield "priority_flood (512^2, 50 seeds)", lambda impl: impl.priority_flood(elev, markers, fg), "exact"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled kernels not built; timing the fallback only\n")
    header = f"{'kernel':<38} {'fallback':>10} {'compiled':>10} {'speedup':>8}  agree"
    print(header)
    print("-" * len(header))
    for name, run, _ in _workloads():
        t_fb, r_fb = _best_time(lambda: run(_fallback), args.repeats)
        if _core is None:
            print(f"{name:<38} {t_fb * 1e3:>8.1f}ms {'-':>10} {'-':>8}")
            continue
        t_c, r_c = _best_time(lambda: run(_core), args.repeats)
        agree = np.array_equal(np.asarray(r_fb), np.asarray(r_c))
        print(f"{name:<38} {t_fb * 1e3:>8.1f}ms {t_c * 1e3:>8.1f}ms {t_fb / t_c:>7.1f}x  {agree}")


if __name__ == "__main__":
    main()
