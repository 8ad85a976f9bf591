#!/usr/bin/env python3
"""Benchmark the hot reduction kernels: compiled extension vs NumPy fallback.

Runs the weighted trig sums (the oscillatory-kernel inner loop) and the
principal-value node sums at a few realistic sizes, prints a timing table,
and cross-checks that both implementations agree.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dampo._core import reference

try:
    from dampo._core import _speedups as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_trig(repeat):
    rng = np.random.default_rng(0)
    print("\nweighted trig sums (c, s, d):")
    print(f"{'nodes':>8} {'times':>7} {'numpy [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for n_nodes, n_times in ((5_000, 200), (30_000, 400), (30_000, 1600), (120_000, 800)):
        omega = np.sort(rng.uniform(1e-3, 100.0, n_nodes))
        weight = rng.normal(scale=1e-4, size=n_nodes)
        times = np.linspace(0.0, 20.0, n_times)
        t_ref = best_of(lambda: reference.trig_sums(omega, weight, times), repeat)
        row = f"{n_nodes:>8} {n_times:>7} {1e3 * t_ref:>12.1f}"
        if compiled is not None:
            t_c = best_of(lambda: compiled.trig_sums(omega, weight, times), repeat)
            ref_out = reference.trig_sums(omega, weight, times)
            c_out = compiled.trig_sums(omega, weight, times)
            for a, b in zip(ref_out, c_out):
                np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-13)
            row += f" {1e3 * t_c:>14.1f} {t_ref / t_c:>8.2f}"
        print(row)


def bench_pv(repeat):
    rng = np.random.default_rng(1)
    print("\nprincipal-value node sums:")
    print(f"{'nodes':>8} {'targets':>8} {'numpy [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}")
    for n_nodes, n_targets in ((7_200, 500), (7_200, 4000), (24_000, 4000)):
        nodes = np.sort(rng.uniform(0.0, 8.0, n_nodes))
        weights = rng.uniform(0.0, 1e-2, n_nodes)
        f_nodes = np.sin(nodes)
        targets = rng.uniform(0.1, 7.9, n_targets)
        f_targets = np.sin(targets)
        args = (targets, f_targets, nodes, weights, f_nodes)
        t_ref = best_of(lambda: reference.pv_sums(*args), repeat)
        row = f"{n_nodes:>8} {n_targets:>8} {1e3 * t_ref:>12.1f}"
        if compiled is not None:
            t_c = best_of(lambda: compiled.pv_sums(*args), repeat)
            # random targets sit arbitrarily close to nodes, so the two
            # summation orders may differ by a few ulp of the largest term
            np.testing.assert_allclose(
                compiled.pv_sums(*args), reference.pv_sums(*args),
                rtol=1e-9, atol=1e-10,
            )
            row += f" {1e3 * t_c:>14.1f} {t_ref / t_c:>8.2f}"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if compiled is None:
        print("compiled extension not available; timing the fallback only")
    bench_trig(args.repeat)
    bench_pv(args.repeat)


if __name__ == "__main__":
    main()
