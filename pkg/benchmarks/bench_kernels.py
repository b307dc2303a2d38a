"""Time the compiled and pure-Python kernel backends on the same inputs.

Usage: python benchmarks/bench_kernels.py [--batch 128] [--labels 15] [--dim 16] [--repeat 200]
"""

import argparse
import time
import timeit

import numpy as np

from hyperball import backend
from hyperball.balls import ball_arrays
from hyperball.config import TrainConfig
from hyperball.data import SynthConfig, generate_synthetic
from hyperball.train import train


def kernel_inputs(B, K, n, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-0.5, 0.5, (B, n)) / np.sqrt(n)
    _, radius, center, alpha = ball_arrays(rng.uniform(-0.6, 0.6, (K, n)) / np.sqrt(n))
    return X, center, radius, alpha, rng.integers(0, K, B).astype(np.int64)


def time_call(fn, repeat):
    per_call = min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat
    return per_call * 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=128)
    ap.add_argument("--labels", type=int, default=15)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    names = backend.available()
    if "compiled" not in names:
        print("compiled extension not built; only the Python backend is available")
    X, center, radius, scale, pos = kernel_inputs(args.batch, args.labels, args.dim)
    cfg = TrainConfig(n=args.dim, epochs=3, lr_riem=1e-2, lr_euc=1e-3)
    ds = generate_synthetic(SynthConfig(samples=2000))

    rows = []
    for name in names:
        backend.use(name)
        t_scores = time_call(lambda: backend.scores(X, center, radius, scale), args.repeat)
        t_grad = time_call(lambda: backend.cls_loss_grad(X, center, radius, scale, pos), args.repeat)
        start = time.perf_counter()
        train(cfg, ds)
        t_train = (time.perf_counter() - start) / cfg.epochs
        rows.append((name, t_scores, t_grad, t_train))

    print(f"B={args.batch} K={args.labels} n={args.dim}")
    print(f"{'backend':<10} {'scores (us)':>12} {'loss+grad (us)':>15} {'epoch (s)':>10}")
    for name, a, b, c in rows:
        print(f"{name:<10} {a:>12.1f} {b:>15.1f} {c:>10.3f}")
    if len(rows) == 2:
        (_, a0, b0, c0), (_, a1, b1, c1) = rows
        print(f"{'speedup':<10} {a1 / a0:>11.1f}x {b1 / b0:>14.1f}x {c1 / c0:>9.1f}x")


if __name__ == "__main__":
    main()
