#!/usr/bin/env python3
"""Timing sweep for the pairwise recursion over K random ellipses.

Reports per-K median/min/max wall-clock over repeated solves, plus the
single-pair timing at a chosen dimension. Useful as a baseline when
comparing against heavier formulations of the same problem.
"""

import argparse
import time

import numpy as np

from ellipsum import Ellipsoid, SolverOptions, mvoe_pair, mvoe_sum


def spd(rng, dim):
    eigs = 10.0 ** rng.uniform(-1.0, 1.0, dim)
    frame, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    m = (frame * eigs) @ frame.T
    return 0.5 * (m + m.T)


def time_repeated(fn, repeats):
    samples = []
    fn()  # warm-up
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return np.median(samples), np.min(samples), np.max(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ks", type=int, nargs="+", default=[4, 6, 8])
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--pair-dim", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=101)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--method", default="auto", choices=["auto", "bisection", "fixed_point", "trace"])
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    opts = SolverOptions(method=args.method)

    print(f"pairwise sums, d={args.dim}, method={args.method}:")
    print(f"{'K':>4} {'median':>12} {'min':>12} {'max':>12}")
    for k in args.ks:
        parts = [Ellipsoid(rng.normal(size=args.dim), spd(rng, args.dim)) for _ in range(k)]
        med, lo, hi = time_repeated(lambda: mvoe_sum(parts, opts), args.repeats)
        print(f"{k:>4} {med * 1e3:>10.4f} ms {lo * 1e3:>10.4f} ms {hi * 1e3:>10.4f} ms")

    e1 = Ellipsoid(rng.normal(size=args.pair_dim), spd(rng, args.pair_dim))
    e2 = Ellipsoid(rng.normal(size=args.pair_dim), spd(rng, args.pair_dim))
    med, lo, hi = time_repeated(lambda: mvoe_pair(e1, e2, opts), args.repeats)
    print(f"\nsingle pair, d={args.pair_dim}: median {med * 1e3:.4f} ms "
          f"(min {lo * 1e3:.4f}, max {hi * 1e3:.4f})")


if __name__ == "__main__":
    main()
