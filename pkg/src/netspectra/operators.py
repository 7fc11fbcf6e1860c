"""Matrix-free application of the link operator S, its inverse-network
twin S*, and the damped combination G(alpha) = alpha*S + (1-alpha)/N.

Dangling columns and the teleport term are rank-one corrections computed
from running sums; no dense column is ever materialized, so one product
costs O(N_l + N).
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import DimensionError, NumericError
from .graphs import DirectedGraph


class StochasticOperator:
    """Column-stochastic operator of a directed graph.

    direction='forward' normalizes out-link columns (the matrix S);
    direction='inverse' does the same on the link-reversed graph (S*),
    with its own dangling set.

    `compensated=True` runs the two length-N reductions (dangling mass and
    vector sum) through exactly rounded summation; the default pairwise
    accumulation already holds the 1e-12 contracts at desk scale, the flag
    is for very large N.
    """

    def __init__(self, graph: DirectedGraph, direction: str = "forward",
                 compensated: bool = False):
        if direction not in ("forward", "inverse"):
            raise ValueError(f"unknown direction {direction!r}")
        self.graph = graph
        self.direction = direction
        self.compensated = compensated
        self.n = graph.n
        if direction == "forward":
            self.indptr, self.indices = graph.out_ptr, graph.out_to
        else:
            self.indptr, self.indices = graph.in_ptr, graph.in_from
        degree = np.diff(self.indptr)
        self.out_degree = degree
        self.dangling = degree == 0
        self.dangling_count = int(np.count_nonzero(self.dangling))
        with np.errstate(divide="ignore"):
            inv = 1.0 / degree
        inv[self.dangling] = 0.0
        self.inv_out_degree = inv

    def _check(self, v):
        v = np.asarray(v)
        if v.shape != (self.n,):
            raise DimensionError(f"vector length {v.shape} != ({self.n},)")
        if not np.all(np.isfinite(v)):
            raise NumericError("non-finite entries in input vector")
        return v

    def apply(self, v, alpha: float = 1.0) -> np.ndarray:
        """y = alpha*S v + (1-alpha)*(sum v)/N.

        Preserves the entry sum for any alpha in [0, 1]; accepts real or
        complex vectors (complex ones are processed per component).
        """
        v = self._check(v)
        if np.iscomplexobj(v):
            return self.apply_complex(v, alpha)
        v = v.astype(np.float64, copy=False)
        contrib = v * self.inv_out_degree
        out = np.zeros(self.n, dtype=np.float64)
        kernels.spmv_contrib(self.indptr, self.indices, contrib, out)
        if alpha != 1.0:
            out *= alpha
        if self.compensated:
            dangling_sum = math.fsum(v[self.dangling])
            total = math.fsum(v)
        else:
            dangling_sum = float(v[self.dangling].sum())
            total = float(v.sum())
        out += (alpha * dangling_sum + (1.0 - alpha) * total) / self.n
        return out

    def apply_complex(self, v, alpha: float = 1.0) -> np.ndarray:
        v = self._check(v).astype(np.complex128, copy=False)
        contrib = v * self.inv_out_degree
        out = np.zeros(self.n, dtype=np.complex128)
        kernels.spmv_contrib_complex(self.indptr, self.indices, contrib, out)
        if alpha != 1.0:
            out *= alpha
        dangling_sum = complex(v[self.dangling].sum())
        total = complex(v.sum())
        out += (alpha * dangling_sum + (1.0 - alpha) * total) / self.n
        return out

    def restrict_to_core(self, decomp) -> "CoreOperator":
        return CoreOperator(self, decomp)


class CoreOperator:
    """The S_cc sub-block: core-to-core links plus the core rows of the
    uniform 1/N columns of dangling core nodes.

    Column sums may fall below one where mass leaks into subspaces; that
    leakage belongs to the other blocks of the triangular structure.
    """

    def __init__(self, op: StochasticOperator, decomp):
        if getattr(decomp, "direction", op.direction) != op.direction:
            raise DimensionError(
                "decomposition direction does not match operator direction"
            )
        core = decomp.core_order
        core_pos = decomp.core_pos
        self.n_core = core.shape[0]
        self.n_full = op.n
        deg = op.out_degree[core]
        starts = np.repeat(op.indptr[core], deg)
        within = np.arange(int(deg.sum()), dtype=np.int64)
        if deg.size:
            run_starts = np.concatenate(([0], np.cumsum(deg)[:-1]))
            within -= np.repeat(run_starts, deg)
        targets = op.indices[starts + within]
        src_pos = np.repeat(np.arange(self.n_core, dtype=np.int64), deg)
        tgt_pos = core_pos[targets]
        keep = tgt_pos >= 0
        src_pos, tgt_pos = src_pos[keep], tgt_pos[keep]
        counts = np.bincount(src_pos, minlength=self.n_core)
        self.indptr = np.zeros(self.n_core + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        order = np.lexsort((tgt_pos, src_pos))
        self.indices = np.ascontiguousarray(tgt_pos[order])
        self.inv_out_degree = op.inv_out_degree[core]
        self.dangling = op.dangling[core]

    def apply(self, v) -> np.ndarray:
        """S_cc v over vectors indexed by the core ordering."""
        v = np.asarray(v)
        if v.shape != (self.n_core,):
            raise DimensionError(f"vector length {v.shape} != ({self.n_core},)")
        if np.iscomplexobj(v):
            v = v.astype(np.complex128, copy=False)
            contrib = v * self.inv_out_degree
            out = np.zeros(self.n_core, dtype=np.complex128)
            kernels.spmv_contrib_complex(self.indptr, self.indices, contrib, out)
        else:
            v = v.astype(np.float64, copy=False)
            contrib = v * self.inv_out_degree
            out = np.zeros(self.n_core, dtype=np.float64)
            kernels.spmv_contrib(self.indptr, self.indices, contrib, out)
        out += v[self.dangling].sum() / self.n_full
        return out

    __call__ = apply


def build_stochastic(g: DirectedGraph, direction: str = "forward") -> StochasticOperator:
    return StochasticOperator(g, direction)


def apply_core(op: StochasticOperator, decomp, v) -> np.ndarray:
    """One-shot S_cc product; build a CoreOperator directly for loops."""
    return CoreOperator(op, decomp).apply(v)
