#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the numpy fallback.

Times the elementwise hot blocks on realistic shapes and a reduced
end-to-end fringe scan through both backends.  The BLAS contraction is
shared, so the delta is the fused transcendental evaluation.

Usage: python benchmarks/bench_kernels.py [--samples N]
"""
import argparse
import dataclasses
import time

import numpy as np

from dtebell import _kernels, interferometer, scenario, spectrum
from dtebell._kernels import fallback
from dtebell.feshbach import PulseSequence


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_blocks(impls):
    rng = np.random.default_rng(7)
    pcm = np.sort(rng.uniform(-8e-30, 8e-30, 400))
    prel = np.sort(rng.uniform(1e-31, 2.4e-28, 4096))
    wrel = rng.uniform(0.5e-31, 2e-31, 4096)
    gcm = rng.uniform(0.1, 1.0, 400)
    beta = rng.uniform(-3e3, 3e3, 4096)
    kdiff = rng.uniform(-2e30, 2e30, 601)
    t = np.sort(rng.uniform(-1.1, 0.1, 200_000))
    w = rng.uniform(0, 1e-5, 200_000)
    phase = rng.uniform(-3e4, 3e4, 200_000)
    omega = rng.uniform(5e3, 8e3, 200)

    rows = []
    for name, impl in impls:
        rows.append((f"density_block 400x4096 [{name}]", timeit(
            lambda: impl.density_block(pcm, prel, wrel, gcm, 5.2e-29, 3.5e-59, 3.7e-56))))
        rows.append((f"phase_block 4096x601   [{name}]", timeit(
            lambda: impl.phase_block(prel, beta, kdiff))))
        rows.append((f"fourier_sums 2e5x200   [{name}]", timeit(
            lambda: _kernels.fourier_sums(t, w, phase, omega, impl=impl))))
    return rows


def bench_scan(impls, samples):
    config = scenario.load_config(scenario.baseline_path())
    pulses = PulseSequence.double_square(
        config.pulses.base_field, config.pulses.pulses[0].height, 20e-3, 0.1)
    config = dataclasses.replace(config, pulses=pulses)
    scales = config.scales()
    grid = spectrum.build_grid(scales, config.trap_ground_state(), points=(129, 513))

    rows = []
    for name, impl in impls:
        _kernels._impl = impl  # backend override for the end-to-end path
        rows.append((f"fringe scan {samples} samples [{name}]", timeit(lambda: (
            interferometer.fringe_scan(grid, scales,
                                       delta_ell_range=(-100e-6, 100e-6),
                                       samples=samples)), repeat=2)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=201)
    args = parser.parse_args()

    impls = [("numpy", fallback)]
    if _kernels.HAVE_EXT:
        from dtebell._kernels import _core
        impls.insert(0, ("compiled", _core))
    else:
        print("compiled kernels not built; benchmarking the fallback only")

    default_impl = _kernels._impl
    try:
        rows = bench_blocks(impls) + bench_scan(impls, args.samples)
    finally:
        _kernels._impl = default_impl

    width = max(len(r[0]) for r in rows)
    print(f"\n{'benchmark':{width}s}   best time")
    for name, t in rows:
        print(f"{name:{width}s}   {t * 1e3:9.1f} ms")
    if _kernels.HAVE_EXT:
        pairs = {}
        for name, t in rows:
            key = name.rsplit("[", 1)[0].strip()
            pairs.setdefault(key, {})[name.rsplit("[", 1)[1].rstrip("]")] = t
        print("\nspeedups (numpy / compiled):")
        for key, d in pairs.items():
            if {"numpy", "compiled"} <= set(d):
                print(f"  {key}: {d['numpy'] / d['compiled']:.2f}x")


if __name__ == "__main__":
    main()
