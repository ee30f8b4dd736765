#!/usr/bin/env python3
"""Benchmark the compiled conv patch kernels against the numpy fallback.

Runs the encoder-shaped stack of eight 3x3 convolutions forward and
backward on a batch of 32x32 images and reports per-view timings for
whichever backends are available.

Usage: python benchmarks/bench_conv.py [n_views]
"""

import sys
import time

import numpy as np

from mirlab.numerics import backend

STAGES = [(3, 8, 1), (8, 8, 2), (8, 16, 1), (16, 16, 2),
          (16, 32, 1), (32, 32, 2), (32, 64, 1), (64, 64, 2)]


def run_stack(x, weights, im2col, col2im):
    acts = []
    for (cin, cout, stride), w in zip(STAGES, weights):
        n, h, ww, _ = x.shape
        cols = im2col(x, stride)
        wmat = w.transpose(2, 3, 1, 0).reshape(9 * cin, cout).copy()
        ho, wo = backend.out_hw(h, ww, stride)
        out = (cols @ wmat).reshape(n, ho, wo, cout)
        acts.append((cols, wmat, x.shape, stride, out > 0))
        x = np.maximum(out, 0.0)
    g = np.ones_like(x)
    for (cols, wmat, xshape, stride, mask) in reversed(acts):
        g2d = (g * mask).reshape(-1, wmat.shape[1])
        _dw = cols.T @ g2d
        g = col2im(g2d @ wmat.T, xshape, stride)
    return x


def bench(name, im2col, col2im, n_views):
    rng = np.random.default_rng(0)
    weights = [rng.standard_normal((cout, cin, 3, 3)) * 0.1
               for cin, cout, _ in STAGES]
    x = rng.random((n_views, 32, 32, 3))
    run_stack(x, weights, im2col, col2im)  # warm-up
    t0 = time.perf_counter()
    run_stack(x, weights, im2col, col2im)
    dt = time.perf_counter() - t0
    print(f"{name:>10}: {dt * 1e3:8.1f} ms total, {dt / n_views * 1e3:6.3f} ms/view (fwd+bwd)")
    return dt


def main():
    n_views = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    print(f"conv stack benchmark, {n_views} views, active backend = {backend.BACKEND}")
    t_py = bench("python", backend._im2col_py, backend._col2im_py, n_views)
    if backend.BACKEND == "compiled":
        t_c = bench("compiled", backend.im2col, backend.col2im, n_views)
        print(f"speedup: {t_py / t_c:.2f}x")
    else:
        print("compiled backend unavailable (build the extension to compare)")


if __name__ == "__main__":
    main()
