"""Exact classification of nodes into invariant subspaces and core space,
plus dense diagonalization of the subspace blocks.

Core nodes are those from which some dangling node is reachable along
links; the complement is forward-closed and dangling-free, and its weak
components are the invariant subspaces V_j. This induces the block
triangular form [[S_ss, S_sc], [0, S_cc]] with each V_j block
column-stochastic on its own.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError
from .graphs import DirectedGraph
from .operators import StochasticOperator

DENSE_GUARD_DEFAULT = 10_000


@dataclass
class SubspaceDecomposition:
    direction: str
    classification: np.ndarray      # -1 for core, else subspace index
    subspaces: list[np.ndarray]     # node ids, each ascending
    core_order: np.ndarray          # core node ids, ascending
    core_pos: np.ndarray            # node id -> position in core_order, -1 otherwise
    oversized_to_core: int = 0      # weak components folded into the core

    @property
    def n(self) -> int:
        return self.classification.shape[0]

    @property
    def n_c(self) -> int:
        return self.core_order.shape[0]

    @property
    def n_s(self) -> int:
        return self.n - self.n_c

    @property
    def n_d(self) -> int:
        return len(self.subspaces)

    @property
    def d_max(self) -> int:
        return max((v.shape[0] for v in self.subspaces), default=0)


@dataclass
class SubspaceBlockSpectrum:
    nodes: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray        # columns follow the eigenvalue order


@dataclass
class SubspaceSpectrum:
    blocks: list[SubspaceBlockSpectrum] = field(default_factory=list)

    def eigenvalue_arrays(self) -> list[np.ndarray]:
        return [b.eigenvalues for b in self.blocks]

    def all_eigenvalues(self) -> np.ndarray:
        if not self.blocks:
            return np.empty(0, dtype=np.complex128)
        return np.concatenate(self.eigenvalue_arrays())


@dataclass(frozen=True)
class SpectrumSummary:
    n_circ: int
    n_1: int
    block_eigenvalues: list


def detect_subspaces(
    g: DirectedGraph, direction: str = "forward",
    dense_guard: int = DENSE_GUARD_DEFAULT,
) -> SubspaceDecomposition:
    """Partition nodes into core space and invariant subspaces.

    The traversal runs backwards from all dangling nodes, so the core is
    exactly the set of nodes with a path to a dangling node; the remaining
    nodes split into weak components numbered by smallest member id.

    A graph with no dangling nodes would leave the core empty; weak
    components larger than `dense_guard` are then folded back into the
    core (reported via `oversized_to_core`) so they stay computable by the
    Krylov path instead of an impossible dense diagonalization.
    """
    if direction == "forward":
        fwd_ptr, fwd_to = g.out_ptr, g.out_to
        bwd_ptr, bwd_to = g.in_ptr, g.in_from
    elif direction == "inverse":
        fwd_ptr, fwd_to = g.in_ptr, g.in_from
        bwd_ptr, bwd_to = g.out_ptr, g.out_to
    else:
        raise ValueError(f"unknown direction {direction!r}")
    n = g.n
    out_deg = np.diff(fwd_ptr)
    dangling = out_deg == 0
    core_mask = _reachable_from(bwd_ptr, bwd_to, np.flatnonzero(dangling), n)

    subspace_nodes = np.flatnonzero(~core_mask)
    label = _weak_components(fwd_ptr, fwd_to, subspace_nodes, n)

    oversized = 0
    if subspace_nodes.size and not dangling.any():
        # Degenerate graph: no dangling nodes anywhere. Oversized weak
        # components go to the core, the rest stay dense-diagonalizable.
        roots, sizes = np.unique(label[subspace_nodes], return_counts=True)
        big = roots[sizes > dense_guard]
        if big.size:
            fold = np.isin(label[subspace_nodes], big)
            core_mask[subspace_nodes[fold]] = True
            oversized = int(big.size)
            subspace_nodes = subspace_nodes[~fold]

    classification = np.full(n, -1, dtype=np.int64)
    subspaces: list[np.ndarray] = []
    if subspace_nodes.size:
        roots = label[subspace_nodes]
        order = np.lexsort((subspace_nodes, roots))
        sorted_nodes = subspace_nodes[order]
        sorted_roots = roots[order]
        boundaries = np.flatnonzero(
            np.concatenate(([True], sorted_roots[1:] != sorted_roots[:-1]))
        )
        for j, start in enumerate(boundaries):
            stop = boundaries[j + 1] if j + 1 < boundaries.size else sorted_nodes.size
            members = np.sort(sorted_nodes[start:stop])
            subspaces.append(members)
            classification[members] = j

    core_order = np.flatnonzero(core_mask)
    core_pos = np.full(n, -1, dtype=np.int64)
    core_pos[core_order] = np.arange(core_order.size, dtype=np.int64)
    decomp = SubspaceDecomposition(
        direction=direction,
        classification=classification,
        subspaces=subspaces,
        core_order=core_order,
        core_pos=core_pos,
        oversized_to_core=oversized,
    )
    _assert_closure(fwd_ptr, fwd_to, decomp)
    return decomp


def _reachable_from(ptr, targets, seeds, n) -> np.ndarray:
    """Breadth-first reachable set (seeds included) over a CSR adjacency."""
    visited = np.zeros(n, dtype=bool)
    visited[seeds] = True
    frontier = seeds
    deg = np.diff(ptr)
    while frontier.size:
        counts = deg[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        gather = np.repeat(ptr[frontier], counts)
        within = np.arange(total, dtype=np.int64)
        run_starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        gather += within - np.repeat(run_starts, counts)
        cand = targets[gather]
        cand = np.unique(cand[~visited[cand]])
        visited[cand] = True
        frontier = cand
    return visited


def _weak_components(ptr, targets, nodes, n) -> np.ndarray:
    """Min-label weak components restricted to `nodes` (forward-closed set).

    Label hooking plus pointer jumping; converges so that every node in
    `nodes` carries the smallest node id of its weak component.
    """
    label = np.arange(n, dtype=np.int64)
    if nodes.size == 0:
        return label
    deg = np.diff(ptr)[nodes]
    src = np.repeat(nodes, deg)
    gather = np.repeat(ptr[nodes], deg)
    total = int(deg.sum())
    within = np.arange(total, dtype=np.int64)
    run_starts = np.concatenate(([0], np.cumsum(deg)[:-1]))
    gather += within - np.repeat(run_starts, deg)
    dst = targets[gather]
    while True:
        before = label
        label = label.copy()
        np.minimum.at(label, dst, before[src])
        np.minimum.at(label, src, label[dst])
        while True:
            jumped = label[label]
            if np.array_equal(jumped, label):
                break
            label = jumped
        if np.array_equal(label, before):
            return label


def _assert_closure(ptr, targets, decomp: SubspaceDecomposition) -> None:
    cls = decomp.classification
    all_deg = np.diff(ptr)
    for j, members in enumerate(decomp.subspaces):
        deg = all_deg[members]
        if np.any(deg == 0):
            raise AssertionError(f"subspace {j} contains a dangling node")
        gather = np.repeat(ptr[members], deg)
        total = int(deg.sum())
        within = np.arange(total, dtype=np.int64)
        run_starts = np.concatenate(([0], np.cumsum(deg)[:-1]))
        gather += within - np.repeat(run_starts, deg)
        out = targets[gather]
        if not np.all(cls[out] == j):
            raise AssertionError(f"subspace {j} is not closed under links")


def subspace_block_matrix(op: StochasticOperator, nodes: np.ndarray) -> np.ndarray:
    """Dense column-normalized block of S restricted to `nodes`.

    Valid only for closed node sets (all out-links land inside), which
    holds for every detected subspace.
    """
    d = nodes.shape[0]
    block = np.zeros((d, d), dtype=np.float64)
    for b, u in enumerate(nodes):
        tgt = op.indices[op.indptr[u]:op.indptr[u + 1]]
        block[np.searchsorted(nodes, tgt), b] = op.inv_out_degree[u]
    return block


def _block_spectrum(op, nodes) -> SubspaceBlockSpectrum:
    from .arnoldi import eigen_sort_indices

    block = subspace_block_matrix(op, nodes)
    values, vectors = np.linalg.eig(block)
    order = eigen_sort_indices(values)
    return SubspaceBlockSpectrum(
        nodes=nodes, eigenvalues=values[order], eigenvectors=vectors[:, order]
    )


def subspace_spectrum(
    op: StochasticOperator, decomp: SubspaceDecomposition,
    guard: int = DENSE_GUARD_DEFAULT, threads: int = 1,
) -> SubspaceSpectrum:
    """Full complex spectrum of every invariant-subspace block of S."""
    if decomp.direction != op.direction:
        raise ValueError("decomposition direction does not match operator")
    for j, nodes in enumerate(decomp.subspaces):
        if nodes.shape[0] > guard:
            raise CapacityError(
                f"subspace {j} has dimension {nodes.shape[0]} "
                f"> dense guard {guard}"
            )
    if threads > 1 and len(decomp.subspaces) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(
                lambda nodes: _block_spectrum(op, nodes), decomp.subspaces
            ))
    else:
        blocks = [_block_spectrum(op, nodes) for nodes in decomp.subspaces]
    return SubspaceSpectrum(blocks=blocks)


def count_unit_eigenvalues(
    spectra, tol_circle: float = 1e-10, tol_one: float = 1e-10,
) -> tuple[int, int]:
    """(N_circ, N_1): eigenvalues on the unit circle / equal to one."""
    arrays = (
        spectra.eigenvalue_arrays()
        if isinstance(spectra, SubspaceSpectrum)
        else list(spectra)
    )
    n_circ = 0
    n_1 = 0
    for values in arrays:
        values = np.asarray(values, dtype=np.complex128)
        n_circ += int(np.count_nonzero(np.abs(np.abs(values) - 1.0) <= tol_circle))
        n_1 += int(np.count_nonzero(np.abs(values - 1.0) <= tol_one))
    return n_circ, n_1


def summarize_spectra(
    spectra: SubspaceSpectrum, tol_circle: float = 1e-10, tol_one: float = 1e-10,
) -> SpectrumSummary:
    n_circ, n_1 = count_unit_eigenvalues(spectra, tol_circle, tol_one)
    return SpectrumSummary(
        n_circ=n_circ, n_1=n_1, block_eigenvalues=spectra.eigenvalue_arrays()
    )
