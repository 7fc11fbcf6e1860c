"""Pure-numpy kernels, used when the compiled extension is unavailable.

Same contracts as _speedups. The cut-count sweep is computed here with
difference arrays over edge rank positions instead of an explicit sweep;
the results are identical integers.
"""

import numpy as np


def spmv_contrib(indptr, indices, contrib, out):
    counts = np.diff(indptr)
    per_edge = np.repeat(contrib, counts)
    out += np.bincount(indices, weights=per_edge, minlength=out.shape[0])


def spmv_contrib_complex(indptr, indices, contrib, out):
    counts = np.diff(indptr)
    per_edge = np.repeat(contrib, counts)
    n = out.shape[0]
    out.real += np.bincount(indices, weights=per_edge.real, minlength=n)
    out.imag += np.bincount(indices, weights=per_edge.imag, minlength=n)


def cut_count_sweep(out_ptr, out_to, in_ptr, in_from, order):
    n = order.shape[0]
    rank = np.empty(n, dtype=np.int64)          # node -> 0-based position
    rank[order] = np.arange(n, dtype=np.int64)
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(out_ptr))
    ru = rank[src]
    rv = rank[out_to]
    # An edge is AA at cut K iff both positions < K, i.e. K > max(ru, rv).
    hi = np.maximum(ru, rv)
    n_aa = np.cumsum(np.bincount(hi + 1, minlength=n + 1)[1:])
    # AB for ru < K <= rv, BA for rv < K <= ru (half-open rank intervals).
    n_ab = _interval_counts(ru, rv, n)
    n_ba = _interval_counts(rv, ru, n)
    return n_aa.astype(np.int64), n_ab, n_ba


def _interval_counts(lo, hi, n):
    """Number of edges with lo < K <= hi for each cut K in 1..n."""
    sel = hi > lo
    diff = np.zeros(n + 2, dtype=np.int64)
    np.add.at(diff, lo[sel] + 1, 1)
    np.add.at(diff, hi[sel] + 1, -1)
    return np.cumsum(diff)[1:n + 1]
