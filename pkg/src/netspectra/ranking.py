"""PageRank and CheiRank by power iteration, with a structure-aware
solver for damping factors next to one, plus rank-decay exponent fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, ValidationError
from .graphs import DirectedGraph
from .operators import CoreOperator, StochasticOperator
from .subspaces import SubspaceDecomposition, subspace_block_matrix


@dataclass
class RankVector:
    """Probability vector with its descending rank permutation.

    `order[r]` is the node holding rank r+1; `ranks[i]` is the 1-based
    rank of node i. Ties are broken by ascending node id.
    """

    probabilities: np.ndarray
    order: np.ndarray
    ranks: np.ndarray
    alpha: float
    iterations: int
    residual: float

    @classmethod
    def from_probabilities(cls, p, alpha, iterations, residual) -> "RankVector":
        p = np.asarray(p, dtype=np.float64)
        n = p.shape[0]
        order = np.lexsort((np.arange(n), -p))
        ranks = np.empty(n, dtype=np.int64)
        ranks[order] = np.arange(1, n + 1)
        return cls(
            probabilities=p, order=order, ranks=ranks,
            alpha=alpha, iterations=iterations, residual=residual,
        )

    @property
    def n(self) -> int:
        return self.probabilities.shape[0]

    def sorted_probabilities(self) -> np.ndarray:
        return self.probabilities[self.order]


@dataclass
class SubspaceRank(RankVector):
    """Rank vector from the near-one solver, with the probability mass
    sitting on invariant subspaces reported alongside."""

    mass_on_subspaces: float = 0.0


@dataclass(frozen=True)
class FitResult:
    exponent: float
    stderr: float
    k_min: int
    k_max: int
    points_used: int


def pagerank(
    op: StochasticOperator, alpha: float = 0.85,
    tol: float = 1e-12, max_iter: int = 10_000,
) -> RankVector:
    """Power iteration for the lambda=1 right eigenvector of G(alpha).

    Starts from the uniform vector and stops when the L1 step change
    drops to `tol`; the stored residual is the explicitly recomputed
    ||G P - P||_1 of the returned (normalized) vector.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValidationError(f"alpha={alpha} outside [0, 1)")
    n = op.n
    v = np.full(n, 1.0 / n)
    iterations = 0
    delta = np.inf
    for iterations in range(1, max_iter + 1):
        w = op.apply(v, alpha)
        delta = float(np.abs(w - v).sum())
        v = w
        if delta <= tol:
            break
    else:
        raise ConvergenceError(
            f"power iteration did not reach tol={tol} in {max_iter} steps "
            f"(last step change {delta:.3e})",
            last=v, residual=delta, iterations=max_iter,
        )
    p = v / v.sum()
    residual = float(np.abs(op.apply(p, alpha) - p).sum())
    return RankVector.from_probabilities(p, alpha, iterations, residual)


def pagerank_near_one(
    op: StochasticOperator,
    decomp: SubspaceDecomposition,
    alpha: float = 1.0 - 1e-8,
    tol: float = 1e-10,
    max_iter: int = 200_000,
) -> SubspaceRank:
    """PageRank for 1-alpha << 1 using the block-triangular structure.

    The core component is iterated to a fixed point (it decouples from
    the subspaces), then each subspace block is solved densely through
    (I - alpha*S_jj) p_j = inflow + teleport. Without subspaces this
    reduces to plain power iteration.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValidationError(f"alpha={alpha} outside [0, 1)")
    if decomp.n != op.n:
        raise DimensionError("decomposition size does not match operator")
    if decomp.direction != op.direction:
        raise DimensionError("decomposition direction does not match operator")
    if decomp.n_s == 0:
        base = pagerank(op, alpha, tol, max_iter)
        return SubspaceRank(
            probabilities=base.probabilities, order=base.order,
            ranks=base.ranks, alpha=alpha, iterations=base.iterations,
            residual=base.residual, mass_on_subspaces=0.0,
        )
    n = op.n
    core = CoreOperator(op, decomp)
    teleport = (1.0 - alpha) / n
    iterations = 0
    x = np.empty(0)
    if core.n_core:
        x = np.full(core.n_core, teleport)
        delta = np.inf
        for iterations in range(1, max_iter + 1):
            xn = alpha * core.apply(x) + teleport
            delta = float(np.abs(xn - x).sum())
            x = xn
            # relative to the (tiny) core mass, so the core components are
            # resolved and not just the global residual
            if delta <= 0.5 * tol * float(np.abs(x).sum()):
                break
        else:
            raise ConvergenceError(
                f"core iteration did not reach tol={tol} in {max_iter} steps "
                f"(last step change {delta:.3e})",
                last=x, residual=delta, iterations=max_iter,
            )
    p = np.zeros(n)
    p[decomp.core_order] = x
    inflow = op.apply(p, alpha=1.0)          # S applied to the core part
    for nodes in decomp.subspaces:
        block = subspace_block_matrix(op, nodes)
        rhs = alpha * inflow[nodes] + teleport
        system = np.eye(nodes.shape[0]) - alpha * block
        p[nodes] = np.linalg.solve(system, rhs)
    p /= p.sum()
    residual = float(np.abs(op.apply(p, alpha) - p).sum())
    if residual > tol:
        raise ConvergenceError(
            f"near-one solve residual {residual:.3e} exceeds tol={tol}",
            last=p, residual=residual, iterations=iterations,
        )
    base = RankVector.from_probabilities(p, alpha, iterations, residual)
    mask = decomp.classification >= 0
    return SubspaceRank(
        probabilities=base.probabilities, order=base.order, ranks=base.ranks,
        alpha=alpha, iterations=iterations, residual=residual,
        mass_on_subspaces=float(p[mask].sum()),
    )


def cheirank(
    g: DirectedGraph, alpha: float = 0.85,
    tol: float = 1e-12, max_iter: int = 10_000,
) -> RankVector:
    """PageRank of the link-reversed network (same code path on S*)."""
    return pagerank(StochasticOperator(g, "inverse"), alpha, tol, max_iter)


def fit_loglog_slope(k: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of log(values) against log(k) and its
    standard error; requires at least 3 strictly positive values."""
    k = np.asarray(k, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if k.shape[0] < 3:
        raise ValidationError("fewer than 3 points in fit range")
    if np.any(values <= 0.0):
        raise ValidationError("non-positive value in fit range (log undefined)")
    x = np.log(k)
    y = np.log(values)
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ y) / sxx
    resid = y - (y.mean() + slope * xm)
    dof = k.shape[0] - 2
    stderr = float(np.sqrt((resid @ resid) / dof / sxx)) if dof > 0 else 0.0
    return slope, stderr


def zipf_fit(rv: RankVector, k_min: int | None = None,
             k_max: int | None = None) -> FitResult:
    """Rank-decay exponent beta from P(K) ~ 1/K^beta over [k_min, k_max].

    The default range is [10, N/100]; the range actually used is part of
    the result, as the exponent depends on it.
    """
    n = rv.n
    if k_min is None:
        k_min = 10
    if k_max is None:
        k_max = n // 100
    if not 1 <= k_min < k_max <= n:
        raise ValidationError(
            f"fit range [{k_min}, {k_max}] invalid for {n} ranks"
        )
    ranks = np.arange(k_min, k_max + 1)
    values = rv.sorted_probabilities()[k_min - 1:k_max]
    slope, stderr = fit_loglog_slope(ranks, values)
    return FitResult(
        exponent=-slope, stderr=stderr, k_min=int(k_min), k_max=int(k_max),
        points_used=int(ranks.shape[0]),
    )
