"""Timing comparison of the compiled and pure-numpy kernel backends.

Run as:  python3 benchmarks/bench_backends.py [--repeat N]

Covers both hot kernels: the block-simulation fidelity sum and the
isometry-search objective. The first numba call includes jit
compilation, so each backend is warmed up before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import eacomp
from eacomp._accel import NUMBA_AVAILABLE, active_backend, force_backend


def _best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_block_fidelity(repeat: int):
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    third = np.array([0.8, 0.6], dtype=complex)
    e = eacomp.make_blind([[1, 0], plus, third], [0.5, 0.3, 0.2])
    n = 10
    code = eacomp.build_code_space(e, n, 0.75)
    print(f"block_fidelity: 3 signals, n={n}, rank={code.rank} "
          f"({3**n} sequences)")
    results = {}
    for backend in backends():
        force_backend(backend)
        eacomp.simulate_fidelity(e, code)
        dt = _best_of(lambda: eacomp.simulate_fidelity(e, code), repeat)
        results[backend] = dt
        print(f"  {backend:6s} {dt * 1e3:9.2f} ms")
    return results


def bench_unitary_objective(repeat: int):
    rng = np.random.default_rng(7)
    vecs = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    vecs /= np.linalg.norm(vecs, axis=0)
    e = eacomp.make_visible([vecs[:, 0], vecs[:, 1]], [0.6, 0.4])
    cfg = eacomp.IsometrySearchConfig(restarts=2, max_iters=60)
    dim = cfg.resolve_env_dim(e.dim_a, e.dim_c) * e.dim_a * e.dim_c
    print(f"unitary_objective via estimate (eps=0.1, generator dim {dim})")
    results = {}
    for backend in backends():
        force_backend(backend)
        eacomp.estimate_i_epsilon(e, 0.1, cfg)
        dt = _best_of(lambda: eacomp.estimate_i_epsilon(e, 0.1, cfg), repeat)
        results[backend] = dt
        print(f"  {backend:6s} {dt * 1e3:9.2f} ms")
    return results


def backends():
    return ("numpy", "numba") if NUMBA_AVAILABLE else ("numpy",)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"default backend: {active_backend()}  (numba available: {NUMBA_AVAILABLE})")
    try:
        a = bench_block_fidelity(args.repeat)
        b = bench_unitary_objective(args.repeat)
    finally:
        force_backend(None)
    if NUMBA_AVAILABLE:
        print(f"speedups (numpy/numba): block_fidelity {a['numpy'] / a['numba']:.1f}x, "
              f"objective {b['numpy'] / b['numba']:.1f}x")


if __name__ == "__main__":
    main()
