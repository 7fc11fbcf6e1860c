"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the stochastic-operator product, a PageRank solve, and the rank-cut
sweep on a synthetic scale-free graph, once per available backend.

    python benchmarks/bench_kernels.py [--nodes N] [--mean-degree D]
"""

import argparse
import time

import numpy as np

from netspectra import build_stochastic, cut_counts, kernels, pagerank
from netspectra.synthetic import scale_free_graph


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(n, mean_degree, seed):
    print(f"generating graph: N={n:,}, mean out-degree {mean_degree} ...")
    g = scale_free_graph(n, mean_out_degree=mean_degree, seed=seed)
    print(f"  N_l = {g.link_count:,}")
    op = build_stochastic(g)
    rng = np.random.default_rng(0)
    v = rng.random(n)
    v /= v.sum()
    order = rng.permutation(n)

    rows = []
    for backend in kernels.available_backends():
        kernels.use_backend(backend)
        apply_s = timeit(lambda: op.apply(v, 0.85))
        pr = timeit(lambda: pagerank(op, 0.85, tol=1e-10), repeats=1)
        cuts = timeit(lambda: cut_counts(g, order))
        rows.append((backend, apply_s, pr, cuts))
    kernels.use_backend("auto")

    print(f"\n{'backend':<10}{'G(a)v':>12}{'pagerank':>12}{'cut sweep':>12}")
    for backend, apply_s, pr, cuts in rows:
        print(f"{backend:<10}{apply_s * 1e3:>10.1f}ms{pr:>11.2f}s"
              f"{cuts * 1e3:>10.1f}ms")
    if len(rows) == 2:
        base = rows[1]
        fast = rows[0]
        print(f"\nspeedup (cython/python): "
              f"G(a)v {base[1] / fast[1]:.1f}x, "
              f"pagerank {base[2] / fast[2]:.1f}x, "
              f"cut sweep {base[3] / fast[3]:.1f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=200_000)
    parser.add_argument("--mean-degree", type=float, default=20.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    run(args.nodes, args.mean_degree, args.seed)
