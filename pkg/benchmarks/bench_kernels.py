"""Compare the compiled and the numpy kernels on representative workloads.

Usage::

    python benchmarks/bench_kernels.py [--dims 16,32,64] [--repeat 3]

Each row reports the best wall time of both backends, the speed-up and the
largest relative difference of their results.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from carleson_cex import kernels
from carleson_cex._engine import TwoBitSpectrum
from carleson_cex.construction import phi_spectrum
from carleson_cex.embedding import embedding_form_spectral
from carleson_cex.measure import DEFAULT_TOL, arc_candidates


def _best(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(float(np.max(np.abs(a))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def bench_accumulate(N, repeat):
    view = TwoBitSpectrum(phi_spectrum(N))
    rank = N // 2 + 2
    asm = view.assemble(rank, DEFAULT_TOL)
    ks = arc_candidates(rank, 32)
    rows = {}
    for name, mod in (("cython", kernels.compiled_backend), ("python", kernels.python_backend)):
        if mod is None:
            continue
        t, (shared, per_arc) = _best(lambda: view.accumulate(asm, ks, backend=mod), repeat)
        rows[name] = (t, shared[None] + per_arc)
    return f"accumulate_pairs N={N} r={rank}", rows


def bench_radial(N, repeat):
    u = np.ldexp(1.0, np.arange(N + 1)) * 3.0 + 2.0
    u = np.tile(u, 2000)
    ell = -math.log1p(-math.ldexp(1.0, -(N // 2)))
    rows = {}
    for name, mod in (("cython", kernels.compiled_backend), ("python", kernels.python_backend)):
        if mod is None:
            continue
        t, out = _best(lambda: mod.radial_factor_vec(u, ell), repeat)
        rows[name] = (t, out)
    return f"radial_factor_vec n={u.size}", rows


def bench_embedding(N, repeat):
    rows = {}
    saved = kernels.bucket_pair_sum
    try:
        for name, mod in (("cython", kernels.compiled_backend), ("python", kernels.python_backend)):
            if mod is None:
                continue
            kernels.bucket_pair_sum = mod.bucket_pair_sum
            t, out = _best(lambda: embedding_form_spectral(N), repeat)
            rows[name] = (t, out)
    finally:
        kernels.bucket_pair_sum = saved
    return f"embedding_form_spectral N={N}", rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--dims", default="16,32,64")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    dims = [int(d) for d in args.dims.split(",")]
    if kernels.compiled_backend is None:
        print("compiled backend not built; timing the numpy kernels only")
    print(f"{'workload':<40}{'cython [s]':>12}{'python [s]':>12}{'speed-up':>10}{'rel diff':>11}")
    for N in dims:
        for bench in (bench_accumulate, bench_radial, bench_embedding):
            label, rows = bench(N, args.repeat)
            tc = rows.get("cython", (math.nan, None))[0]
            tp = rows.get("python", (math.nan, None))[0]
            diff = _rel(rows["cython"][1], rows["python"][1]) if len(rows) == 2 else math.nan
            print(f"{label:<40}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
