"""Krylov-subspace computation of the largest-modulus eigenvalues and
eigenvectors of the core-space block S_cc.

A single Arnoldi sweep with two-pass Gram-Schmidt re-orthogonalization
projects the operator onto a Hessenberg matrix; its eigenvalues (Ritz
values) approximate the dominant spectrum, and Ritz vectors are assembled
from the orthonormal basis with explicitly computed residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    EigenSolverError,
    NumericError,
    ValidationError,
)
from .graphs import DirectedGraph
from .operators import CoreOperator, StochasticOperator

DEFAULT_MEMORY_BUDGET = 8 << 30          # bytes of basis storage
RESIDUAL_THRESHOLD_DEFAULT = 1e-6


@dataclass
class KrylovBasis:
    vectors: np.ndarray                  # n x k, orthonormal columns
    breakdown_step: int | None = None    # step where the residual vanished

    @property
    def n_vectors(self) -> int:
        return self.vectors.shape[1]


@dataclass
class EigenPair:
    value: complex
    phase: float
    vector: np.ndarray | None
    residual: float
    order_index: int                     # 1-based position in |lambda| order
    converged: bool = True


def eigen_sort_indices(values: np.ndarray) -> np.ndarray:
    """Order eigenvalues by decreasing |lambda|, then decreasing real
    part, then increasing imaginary part (deterministic, pairs adjacent).

    The modulus key is rounded at 1e-12 so that mathematically equal
    moduli (for example a unit-circle triple) tie and fall through to the
    real-part ordering instead of flipping on 1-ulp differences."""
    values = np.asarray(values)
    return np.lexsort((values.imag, -values.real, -np.round(np.abs(values), 12)))


def _phase(value: complex) -> float:
    phi = float(np.angle(value))
    if phi <= -np.pi:
        phi = np.pi
    return phi


_BREAKDOWN_NOISE = 1e-13    # relative floor below which w is orthogonalization noise


def arnoldi_iterate(apply_fn, start, n_steps: int, breakdown_tol: float = 0.0,
                    on_breakdown: str = "truncate", rng=None):
    """Classical Arnoldi sweep with two-pass Gram-Schmidt.

    Parameters
    ----------
    apply_fn : callable mapping a length-n real vector to another
    start : nonzero start vector
    n_steps : Krylov dimension (at most n)
    breakdown_tol : subdiagonal norm at or below which the Krylov space is
        declared invariant (a relative noise floor applies in addition:
        normalizing a vector that is pure orthogonalization residue would
        destroy the basis)
    on_breakdown : 'truncate' returns the basis built so far; 'continue'
        restarts the sweep in the orthogonal complement with a fresh
        deterministic direction, so the full spectrum stays reachable
        when n_steps equals the space dimension
    rng : numpy Generator for the 'continue' replacement directions
        (a fixed-seed generator is created when omitted)

    Returns (KrylovBasis, H) with H of shape (k+1, k) upper-Hessenberg,
    k = number of basis vectors actually built. `breakdown_step` on the
    basis records the first step whose residual vanished, if any.
    """
    if on_breakdown not in ("truncate", "continue"):
        raise ValidationError(f"unknown on_breakdown mode {on_breakdown!r}")
    start = np.asarray(start, dtype=np.float64)
    n = start.shape[0]
    if not 1 <= n_steps <= n:
        raise ValidationError(f"n_steps={n_steps} outside [1, {n}]")
    nrm = float(np.linalg.norm(start))
    if nrm == 0.0:
        raise ValidationError("start vector is zero")
    if not np.isfinite(nrm):
        raise NumericError("start vector has non-finite entries")
    basis = np.zeros((n, n_steps + 1), dtype=np.float64, order="F")
    hess = np.zeros((n_steps + 1, n_steps), dtype=np.float64)
    basis[:, 0] = start / nrm
    breakdown = None
    k = n_steps
    for step in range(n_steps):
        w = np.asarray(apply_fn(basis[:, step]), dtype=np.float64)
        if not np.all(np.isfinite(w)):
            raise NumericError(f"non-finite operator output at step {step + 1}")
        w_scale = float(np.linalg.norm(w))
        prior = basis[:, :step + 1]
        coeff = prior.T @ w
        w -= prior @ coeff
        second = prior.T @ w               # second pass recovers orthogonality
        w -= prior @ second
        coeff += second
        beta = float(np.linalg.norm(w))
        hess[:step + 1, step] = coeff
        hess[step + 1, step] = beta
        if beta <= max(breakdown_tol, _BREAKDOWN_NOISE * w_scale):
            if breakdown is None:
                breakdown = step + 1
            if on_breakdown == "truncate":
                k = step + 1
                break
            if step + 1 < n_steps:      # final step needs no next direction
                if rng is None:
                    rng = np.random.default_rng(0)
                basis[:, step + 1] = _fresh_direction(
                    basis[:, :step + 1], n, rng
                )
        else:
            basis[:, step + 1] = w / beta
    return (
        KrylovBasis(vectors=basis[:, :k], breakdown_step=breakdown),
        hess[:k + 1, :k],
    )


def _fresh_direction(prior, n, rng) -> np.ndarray:
    """Unit vector orthogonal to the columns of `prior`."""
    for _ in range(20):
        cand = rng.standard_normal(n)
        scale = float(np.linalg.norm(cand))
        for _ in range(2):
            cand -= prior @ (prior.T @ cand)
        nrm = float(np.linalg.norm(cand))
        # anything clearly above the orthogonalization noise floor works
        if nrm > 1e-6 * scale:
            return cand / nrm
    raise NumericError("could not draw a direction outside the Krylov basis")


def hessenberg_eigen(hess: np.ndarray) -> np.ndarray:
    """All eigenvalues of the (leading square part of the) Hessenberg
    matrix, sorted by decreasing modulus."""
    hess = np.asarray(hess, dtype=np.float64)
    k = hess.shape[1]
    square = hess[:k, :k]
    if k > 2 and np.any(np.tril(square, -2) != 0.0):
        raise ValidationError("matrix is not upper-Hessenberg")
    try:
        values = np.linalg.eigvals(square)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"QR iteration failed to converge: {exc}") from exc
    return values[eigen_sort_indices(values)]


def _sorted_hessenberg_pairs(hess: np.ndarray):
    k = hess.shape[1]
    try:
        values, y = np.linalg.eig(hess[:k, :k])
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"QR iteration failed to converge: {exc}") from exc
    order = eigen_sort_indices(values)
    return values[order], y[:, order]


def _make_pair(apply_fn, basis_vectors, value, y, order_index) -> EigenPair:
    psi = (basis_vectors @ y).astype(np.complex128)
    nrm = np.linalg.norm(psi)
    if nrm > 0:
        psi = psi / nrm
    top = int(np.argmax(np.abs(psi)))
    pivot = psi[top]
    if pivot != 0:
        psi = psi * (pivot.conjugate() / abs(pivot))
    residual = float(np.linalg.norm(apply_fn(psi) - value * psi))
    return EigenPair(
        value=complex(value),
        phase=_phase(value),
        vector=psi,
        residual=residual,
        order_index=order_index,
    )


def ritz_vectors(apply_fn, basis: KrylovBasis, hess: np.ndarray,
                 selection=None) -> list[EigenPair]:
    """Assemble Ritz pairs for the selected eigenvalue indices.

    Indices refer to the sorted Ritz order; the phase convention makes the
    largest-modulus component of each vector real positive. `apply_fn`
    must accept complex input, as the residual is recomputed explicitly.
    """
    values, y = _sorted_hessenberg_pairs(hess)
    if selection is None:
        selection = range(values.shape[0])
    pairs = []
    for idx in selection:
        if not 0 <= idx < values.shape[0]:
            raise ValidationError(f"selection index {idx} out of range")
        pairs.append(
            _make_pair(apply_fn, basis.vectors, values[idx], y[:, idx], idx + 1)
        )
    return pairs


def core_spectrum(
    g: DirectedGraph,
    decomp,
    direction: str = "forward",
    n_arnoldi: int = 100,
    seed: int | None = None,
    residual_threshold: float = RESIDUAL_THRESHOLD_DEFAULT,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    vectors: str = "converged",
) -> list[EigenPair]:
    """Leading core-space eigenpairs via the projected Arnoldi sweep.

    Ritz pairs whose residual passes `residual_threshold` get node-space
    eigenvectors (zero on subspace nodes); the rest are reported with
    vector=None, their residual estimated from the Arnoldi relation, and
    converged=False. `vectors` may be 'converged', 'all' or 'none'.

    The start vector is uniform over core nodes, or seeded standard
    normal when `seed` is given. Basis storage is checked against
    `memory_budget` before any iteration.
    """
    if vectors not in ("converged", "all", "none"):
        raise ValidationError(f"unknown vectors mode {vectors!r}")
    op = StochasticOperator(g, direction)
    core = CoreOperator(op, decomp)
    n_core = core.n_core
    if n_core == 0:
        return []
    if not 1 <= n_arnoldi <= n_core:
        raise ValidationError(
            f"n_arnoldi={n_arnoldi} outside [1, core dimension {n_core}]"
        )
    need = (n_arnoldi + 1) * n_core * 8
    if need > memory_budget:
        raise CapacityError(
            f"Arnoldi basis needs {need} bytes ({n_arnoldi + 1} x {n_core} "
            f"doubles) > memory budget {memory_budget}"
        )
    if seed is None:
        start = np.full(n_core, 1.0 / n_core)
        rng = np.random.default_rng(0)
    else:
        rng = np.random.default_rng(seed)
        start = rng.standard_normal(n_core)
    basis, hess = arnoldi_iterate(
        core.apply, start, n_arnoldi, on_breakdown="continue", rng=rng
    )
    k = basis.n_vectors
    values, y = _sorted_hessenberg_pairs(hess)
    beta = float(hess[k, k - 1]) if hess.shape[0] > k else 0.0
    estimates = beta * np.abs(y[-1, :])
    core_order = decomp.core_order
    pairs: list[EigenPair] = []
    for idx in range(values.shape[0]):
        estimate = float(estimates[idx])
        build_vec = vectors == "all" or (
            vectors == "converged" and estimate <= residual_threshold
        )
        if build_vec:
            pair = _make_pair(core.apply, basis.vectors, values[idx],
                              y[:, idx], idx + 1)
            full = np.zeros(g.n, dtype=np.complex128)
            full[core_order] = pair.vector
            pair.vector = full
            pair.converged = pair.residual <= residual_threshold
        else:
            pair = EigenPair(
                value=complex(values[idx]),
                phase=_phase(values[idx]),
                vector=None,
                residual=estimate,
                order_index=idx + 1,
                converged=estimate <= residual_threshold,
            )
        pairs.append(pair)
    return pairs
