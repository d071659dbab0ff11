#!/usr/bin/env python3
"""Benchmark the compiled bootstrap kernel against the pure-NumPy fallback.

Runs the replicate kernel on representative problem sizes (inference-half
length n, covariate count k, bootstrap draws B) and reports per-call times
and the speedup. Invoke from the repo root:

    python3 benchmarks/bench_backends.py [--repeats 7]
"""

import argparse
import time

import numpy as np

from tsplit.backend import py_kernels
from tsplit.moments import ModelSpec, compute_psi, per_observation_contributions
from tsplit.splitboot import block_sums, default_block_len, make_blocks

try:
    from tsplit.backend import _kernels
except ImportError:
    _kernels = None


def kernel_inputs(n, k, B, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, k))
    y = x @ rng.standard_normal(k) + rng.standard_normal(n)
    data = np.column_stack([y, x])
    model = ModelSpec(tuple(range(1, k + 1)))
    psi = compute_psi(data, model)
    scheme = make_blocks(n, default_block_len(n))
    sums = np.ascontiguousarray(block_sums(per_observation_contributions(data, model), scheme))
    mult = rng.standard_normal((B, scheme.n_blocks))
    return psi.as_vector(), sums, 1.0 / n, mult, k, 0, 1e-12


def best_time(func, args, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernels are not built; only the NumPy fallback is available")

    cases = [(500, 1, 500), (1000, 1, 500), (1000, 2, 500), (1000, 3, 500),
             (2000, 3, 500), (1000, 2, 5000), (12, 1, 200_000)]
    header = f"{'n':>6} {'k':>3} {'B':>8} {'numpy (ms)':>12} {'cython (ms)':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n, k, B in cases:
        inputs = kernel_inputs(n, k, B, seed=hash((n, k, B)) % 2**32)
        t_py = best_time(py_kernels.bootstrap_replicates, inputs, args.repeats)
        if _kernels is not None:
            t_cy = best_time(_kernels.bootstrap_replicates, inputs, args.repeats)
            out_py, valid_py = py_kernels.bootstrap_replicates(*inputs)
            out_cy, valid_cy = _kernels.bootstrap_replicates(*inputs)
            assert (valid_py == valid_cy).all()
            assert np.allclose(out_py[valid_py], out_cy[valid_cy], rtol=1e-9)
            print(f"{n:>6} {k:>3} {B:>8} {t_py * 1e3:>12.3f} {t_cy * 1e3:>12.3f} "
                  f"{t_py / t_cy:>8.2f}x")
        else:
            print(f"{n:>6} {k:>3} {B:>8} {t_py * 1e3:>12.3f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
