"""Seeded synthetic graph generators for benchmarks and scale tests."""

from __future__ import annotations

import numpy as np

from .graphs import DirectedGraph


def scale_free_graph(
    n: int,
    mean_out_degree: float = 20.0,
    dangling_fraction: float = 0.1,
    popularity_exponent: float = 0.9,
    degree_exponent: float = 2.5,
    seed: int = 0,
) -> DirectedGraph:
    """Directed graph with power-law out-degrees and preferential targets.

    Out-degrees follow a truncated Pareto law with the requested mean;
    targets are drawn from a Zipf-like popularity over a permuted node
    order, which yields a heavy-tailed in-degree distribution. A fixed
    fraction of nodes is made dangling. Duplicate edges collapse, so the
    realized link count is slightly below mean_out_degree * n.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = np.random.default_rng(seed)

    gamma = degree_exponent
    d_min = mean_out_degree * (gamma - 2.0) / (gamma - 1.0)
    u = rng.random(n)
    out_deg = np.floor(d_min * u ** (-1.0 / (gamma - 1.0))).astype(np.int64)
    out_deg = np.clip(out_deg, 1, max(2, n // 50))
    dangling = rng.random(n) < dangling_fraction
    out_deg[dangling] = 0

    popularity = (np.arange(1, n + 1, dtype=np.float64)) ** (-popularity_exponent)
    rng.shuffle(popularity)
    cdf = np.cumsum(popularity)
    cdf /= cdf[-1]

    total = int(out_deg.sum())
    src = np.repeat(np.arange(n, dtype=np.int64), out_deg)
    dst = np.searchsorted(cdf, rng.random(total)).astype(np.int64)
    return DirectedGraph.from_edge_arrays(src, dst, n=n)
