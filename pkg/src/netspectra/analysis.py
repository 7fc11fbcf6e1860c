"""Derived metrics over rank vectors and eigenvectors: the PageRank and
CheiRank correlator, inverse participation ratios, tail-decay exponents,
rank-cut link counts, rank-plane density grids, and word-frequency
community labels.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, ValidationError
from .graphs import DirectedGraph
from .ranking import FitResult, RankVector, fit_loglog_slope

DEFAULT_STOPWORDS = frozenset(
    "the of a an and or in on at to for by with from as is are was were "
    "be been it its this that".split()
)


@dataclass
class CutCounts:
    """Link counts against the rank cut: for each K, set A holds the top-K
    nodes of the ordering and B the rest."""

    n_links: int
    n_aa: np.ndarray
    n_ab: np.ndarray
    n_ba: np.ndarray

    @property
    def n_bb(self) -> np.ndarray:
        return self.n_links - self.n_aa - self.n_ab - self.n_ba

    @property
    def cuts(self) -> np.ndarray:
        return np.arange(1, self.n_aa.shape[0] + 1)


@dataclass
class DensityGrid:
    weights: np.ndarray         # weights[ix, iy], x ~ K, y ~ K*
    x_edges: np.ndarray         # rank-space cell edges, len cells+1
    y_edges: np.ndarray
    scale: str


def _probabilities(p) -> np.ndarray:
    if isinstance(p, RankVector):
        return p.probabilities
    return np.asarray(p, dtype=np.float64)


def correlator(p, pstar) -> float:
    """kappa = N * sum_i P(i) P*(i) - 1; zero for uncorrelated vectors."""
    a = _probabilities(p)
    b = _probabilities(pstar)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch {a.shape} vs {b.shape}")
    return float(a.shape[0] * (a @ b) - 1.0)


def ipr(psi) -> float:
    """Inverse participation ratio: effective number of nodes carrying the
    vector's weight; 1 for a point mass, N for uniform modulus."""
    mag2 = np.abs(np.asarray(psi)) ** 2
    total = float(mag2.sum())
    if total == 0.0:
        raise ValidationError("IPR of a zero vector is undefined")
    return float(total * total / (mag2 @ mag2))


def eigenvalue_phase(value: complex) -> float:
    """Principal argument of an eigenvalue in (-pi, pi]."""
    if value == 0:
        raise ValidationError("phase of zero is undefined")
    phi = float(np.angle(value))
    if phi <= -np.pi:
        phi = np.pi
    return phi


def rank_order(values) -> np.ndarray:
    """Node ids ordered by decreasing |value|, ties by ascending id."""
    mags = np.abs(np.asarray(values))
    return np.lexsort((np.arange(mags.shape[0]), -mags))


def decay_exponent(psi, k_threshold: int | None = None) -> FitResult:
    """Power-law exponent b of the sorted modulus tail |psi|(K) ~ K^b.

    Fits beyond rank `k_threshold` (default 10^4, scaled down to
    max(10, N//100) for vectors shorter than 10^5 entries); zero entries
    past the threshold are excluded, and at least 3 positive points are
    required.
    """
    mags = np.abs(np.asarray(psi))
    n = mags.shape[0]
    if k_threshold is None:
        k_eff = 10_000 if n >= 100_000 else max(10, n // 100)
    else:
        k_eff = int(k_threshold)
    if not 1 <= k_eff <= n:
        raise ValidationError(f"threshold {k_eff} outside [1, {n}]")
    tail = np.sort(mags)[::-1][k_eff - 1:]
    positive = tail > 0.0
    values = tail[positive]
    ranks = np.arange(k_eff, n + 1)[positive]
    if values.shape[0] < 3:
        raise ValidationError(
            f"only {values.shape[0]} positive values beyond rank {k_eff}"
        )
    slope, stderr = fit_loglog_slope(ranks, values)
    return FitResult(
        exponent=slope, stderr=stderr, k_min=int(k_eff), k_max=int(ranks[-1]),
        points_used=int(values.shape[0]),
    )


def _check_permutation(order, n) -> np.ndarray:
    order = np.ascontiguousarray(order, dtype=np.int64)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise ValidationError("ordering is not a permutation of the nodes")
    return order


def cut_counts(g: DirectedGraph, ordering) -> CutCounts:
    """Sweep the rank cut through `ordering` (node ids, best rank first)
    and count links inside A, from A to B, and from B to A at every cut.

    Only explicit adjacency links are counted; the uniform dangling
    columns of S contribute nothing here. Cost O(N_l + N).
    """
    order = _check_permutation(ordering, g.n)
    n_aa, n_ab, n_ba = kernels.cut_count_sweep(
        g.out_ptr, g.out_to, g.in_ptr, g.in_from, order
    )
    return CutCounts(n_links=g.link_count, n_aa=n_aa, n_ab=n_ab, n_ba=n_ba)


def density_grid(
    k_ranks, kstar_ranks, cells_per_axis: int = 100, scale: str = "linear",
) -> DensityGrid:
    """Node density over the (K, K*) rank plane.

    Every node deposits weight 1/N into the cell holding its rank pair;
    cells are equal width in rank (linear) or in ln(rank) spanning
    [0, ln N] (log). The weights sum to one by construction.
    """
    if cells_per_axis < 1:
        raise ValidationError("cells_per_axis must be at least 1")
    if scale not in ("linear", "log"):
        raise ValidationError(f"unknown scale {scale!r}")
    ka = np.asarray(k_ranks, dtype=np.int64)
    kb = np.asarray(kstar_ranks, dtype=np.int64)
    if ka.shape != kb.shape:
        raise DimensionError("rank arrays differ in length")
    n = ka.shape[0]
    for arr in (ka, kb):
        if not np.array_equal(np.sort(arr), np.arange(1, n + 1)):
            raise ValidationError("ranks are not a permutation of 1..N")
    cells = int(cells_per_axis)
    if scale == "linear":
        ix = (ka - 1) * cells // n
        iy = (kb - 1) * cells // n
        edges = 1.0 + np.arange(cells + 1) * (n / cells)
    else:
        log_n = np.log(n) if n > 1 else 1.0
        ix = np.minimum((np.log(ka) / log_n * cells).astype(np.int64), cells - 1)
        iy = np.minimum((np.log(kb) / log_n * cells).astype(np.int64), cells - 1)
        edges = np.exp(np.arange(cells + 1) * (np.log(n) if n > 1 else 0.0) / cells)
    counts = np.zeros((cells, cells), dtype=np.int64)
    np.add.at(counts, (ix, iy), 1)
    return DensityGrid(
        weights=counts / n, x_edges=edges, y_edges=edges.copy(), scale=scale,
    )


def top_nodes(psi, labels=None, count: int = 20) -> list[tuple[int, int, float, str]]:
    """The `count` nodes with largest |psi| as (rank, node, |psi|, label)."""
    mags = np.abs(np.asarray(psi))
    order = rank_order(mags)[:max(count, 0)]
    table = labels or {}
    return [
        (pos + 1, int(node), float(mags[node]),
         table.get(int(node), f"node:{int(node)}"))
        for pos, node in enumerate(order)
    ]


def word_frequency(labels, stopwords=DEFAULT_STOPWORDS) -> list[tuple[str, int]]:
    """Case-folded, punctuation-stripped word counts over label strings,
    sorted by count (descending) then alphabetically. The first entry is
    the community label."""
    counts: Counter[str] = Counter()
    for label in labels:
        cleaned = re.sub(r"[^\w\s]", " ", label.casefold())
        counts.update(tok for tok in cleaned.split() if tok not in stopwords)
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def select_near_circle(spectrum, count: int = 200):
    """The `count` eigenpairs with largest |lambda|.

    When the cut would split a complex-conjugate pair tied at the
    boundary, the selection is extended by one so the returned set stays
    closed under conjugation.
    """
    pairs = sorted(
        spectrum,
        key=lambda p: (-round(abs(p.value), 12), -p.value.real, p.value.imag),
    )
    if count >= len(pairs):
        return pairs
    take = max(count, 0)
    if take and pairs[take - 1].value.imag != 0.0:
        last, nxt = pairs[take - 1].value, pairs[take].value
        if abs(nxt - last.conjugate()) <= 1e-12 * max(1.0, abs(last)):
            take += 1
    return pairs[:take]
