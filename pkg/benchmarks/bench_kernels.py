#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times every kernel on representative workloads, checks that the two
backends agree, and prints a comparison table. Run from the repo root:

    python3 benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from opspace import _kernels_py

try:
    from opspace import _kernels_cy
except ImportError:
    _kernels_cy = None


def _best_of(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _bench_lcs(backend, pairs):
    def run():
        total = 0
        for a, b in pairs:
            total += backend.lcs_longest(a, b)[2]
        return total

    return _best_of(run)


def _bench_assign(backend, x, c):
    return _best_of(lambda: backend.assign_points(x, c))


def _bench_pairwise(backend, x):
    return _best_of(lambda: backend.pairwise_sq_dists(x))


def _bench_tsne(backend, y, p):
    return _best_of(lambda: backend.tsne_grad_kl(y, p, p))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    scale = 4 if args.quick else 1

    n_pairs = 4000 // scale
    pairs = []
    for _ in range(n_pairs):
        la, lb = rng.integers(6, 16, size=2)
        pairs.append(
            (
                rng.integers(0, 12, size=la).astype(np.int32),
                rng.integers(0, 12, size=lb).astype(np.int32),
            )
        )

    n_assign = 4000 // scale
    x_assign = rng.standard_normal((n_assign, 64))
    centroids = rng.standard_normal((60, 64))

    n_pair = 1600 // scale
    x_pair = rng.standard_normal((n_pair, 64))

    n_tsne = 1000 // scale
    y = rng.standard_normal((n_tsne, 2))
    p = rng.random((n_tsne, n_tsne))
    p = (p + p.T) / 2
    np.fill_diagonal(p, 0.0)
    p /= p.sum()

    workloads = [
        (f"lcs_longest        ({n_pairs} pairs)", _bench_lcs, (pairs,)),
        (f"assign_points      (n={n_assign}, k=60, d=64)", _bench_assign, (x_assign, centroids)),
        (f"pairwise_sq_dists  (n={n_pair}, d=64)", _bench_pairwise, (x_pair,)),
        (f"tsne_grad_kl       (n={n_tsne})", _bench_tsne, (y, p)),
    ]

    print(f"{'kernel':42} {'python':>10} {'cython':>10} {'speedup':>8}")
    for label, bench, data in workloads:
        t_py, r_py = bench(_kernels_py, *data)
        if _kernels_cy is None:
            print(f"{label:42} {t_py * 1e3:9.1f}ms {'missing':>10} {'-':>8}")
            continue
        t_cy, r_cy = bench(_kernels_cy, *data)
        _check_agreement(label, r_py, r_cy)
        print(
            f"{label:42} {t_py * 1e3:9.1f}ms {t_cy * 1e3:9.1f}ms {t_py / t_cy:7.1f}x"
        )
    if _kernels_cy is None:
        print("\ncompiled extension not available; showing the fallback only")


def _check_agreement(label, r_py, r_cy):
    if isinstance(r_py, tuple):
        for a, b in zip(r_py, r_cy):
            np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9)
    elif isinstance(r_py, (int, float)):
        assert abs(r_py - r_cy) <= 1e-9 * max(1.0, abs(r_py)), label
    else:
        np.testing.assert_allclose(r_py, r_cy, rtol=1e-9, atol=1e-9)


if __name__ == "__main__":
    main()
