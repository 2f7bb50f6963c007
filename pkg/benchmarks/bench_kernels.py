"""Benchmark the direct-convolution kernel: numba JIT vs pure numpy.

The production right-hand side is the FFT/BLAS pseudo-spectral route; the
dense convolution benchmarked here is the validation path, and the numba
kernel is its compiled variant.  Run:

    python3 benchmarks/bench_kernels.py [--J 10] [--M 3] [--repeat 20]
"""

import argparse
import time

import numpy as np

from nlwaves import kernels


def bench(fn, T, a, dk, repeat):
    fn(T, a, dk)  # warm-up (numba compiles here)
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn(T, a, dk)
    return (time.perf_counter() - t0) / repeat, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--J", type=int, default=10)
    ap.add_argument("--M", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    Kf = 2 * args.J + 1
    shape = (Kf, Kf, args.M, args.M, args.M)
    T = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    a = rng.standard_normal((args.M, Kf)) + 1j * rng.standard_normal((args.M, Kf))
    dk = 0.25

    t_np, out_np = bench(kernels._convolve_direct_numpy, T, a, dk, args.repeat)
    print(f"numpy : {t_np * 1e3:8.3f} ms/call")
    if kernels.USE_NUMBA:
        t_nb, out_nb = bench(kernels._convolve_direct_numba, T, a, dk, args.repeat)
        err = np.abs(out_nb - out_np).max() / np.abs(out_np).max()
        print(f"numba : {t_nb * 1e3:8.3f} ms/call  (speedup {t_np / t_nb:.1f}x, "
              f"max rel diff {err:.2e})")
    else:
        print("numba : disabled (NLWAVES_NO_NUMBA set)")


if __name__ == "__main__":
    main()
