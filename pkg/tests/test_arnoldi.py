import numpy as np
import pytest

from netspectra import (
    build_stochastic,
    core_spectrum,
    detect_subspaces,
    hessenberg_eigen,
    ritz_vectors,
)
from netspectra.arnoldi import arnoldi_iterate, eigen_sort_indices
from netspectra.errors import CapacityError, ValidationError
from netspectra.operators import CoreOperator

from oracles import dense_core_block, hausdorff, reciprocal_cycle_graph


def two_cycle_apply(v):
    return np.array([v[1], v[0]], dtype=v.dtype)


def test_two_cycle_exact_basis_and_hessenberg():
    basis, hess = arnoldi_iterate(two_cycle_apply, np.array([1.0, 0.0]), 2)
    np.testing.assert_array_equal(basis.vectors,
                                  np.array([[1.0, 0.0], [0.0, 1.0]]))
    np.testing.assert_array_equal(hess[:2, :2],
                                  np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert basis.breakdown_step == 2       # Krylov space closed at the end


def test_identity_happy_breakdown():
    basis, hess = arnoldi_iterate(lambda v: v.copy(), np.array([3.0]), 1)
    assert basis.breakdown_step == 1
    np.testing.assert_array_equal(hess[:1, :1], [[1.0]])


def test_truncation_on_early_breakdown():
    basis, hess = arnoldi_iterate(lambda v: v.copy(), np.ones(4), 3)
    assert basis.breakdown_step == 1
    assert basis.n_vectors == 1
    assert hess.shape == (2, 1)
    np.testing.assert_allclose(hess[0, 0], 1.0, atol=1e-15)


def test_continue_mode_reaches_full_spectrum():
    diag = np.array([0.9, 0.5, 0.1, -0.4])
    apply_fn = lambda v: diag * v
    start = np.array([1.0, 1.0, 0.0, 0.0])   # deficient start
    basis, hess = arnoldi_iterate(apply_fn, start, 4, on_breakdown="continue",
                                  rng=np.random.default_rng(0))
    assert basis.n_vectors == 4
    ritz = hessenberg_eigen(hess)
    np.testing.assert_allclose(np.sort(ritz.real), np.sort(diag), atol=1e-10)


def test_zero_start_rejected():
    with pytest.raises(ValidationError):
        arnoldi_iterate(two_cycle_apply, np.zeros(2), 2)


def test_steps_beyond_dimension_rejected():
    with pytest.raises(ValidationError):
        arnoldi_iterate(two_cycle_apply, np.array([1.0, 0.0]), 3)


def test_hessenberg_eigen_permutation():
    values = hessenberg_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(values, [1.0, -1.0], atol=1e-15)


def test_hessenberg_eigen_triangular():
    tri = np.triu(np.arange(1.0, 17.0).reshape(4, 4))
    values = hessenberg_eigen(tri)
    np.testing.assert_allclose(sorted(values.real, reverse=True),
                               sorted(np.diag(tri), reverse=True), atol=1e-12)


def test_hessenberg_eigen_vs_characteristic_polynomial():
    """Independent oracle: exact char poly (sympy over integers) and
    arbitrary-precision root finding (mpmath), no LAPACK involved."""
    import mpmath
    import sympy

    rng = np.random.default_rng(42)
    h = np.triu(rng.integers(-4, 5, (5, 5)).astype(float), -1)
    coeffs = sympy.Matrix(h.astype(int)).charpoly().all_coeffs()
    roots = mpmath.polyroots([int(c) for c in coeffs], maxsteps=200,
                             extraprec=120)
    oracle = np.array([complex(r) for r in roots])
    got = hessenberg_eigen(h)
    assert hausdorff(got, oracle) <= 1e-10


def test_hessenberg_rejects_non_hessenberg():
    with pytest.raises(ValidationError):
        hessenberg_eigen(np.ones((3, 3)))


def test_conjugate_pairing_exact():
    rng = np.random.default_rng(1)
    h = np.triu(rng.standard_normal((8, 8)), -1)
    values = hessenberg_eigen(h)
    complexes = values[values.imag != 0]
    assert complexes.size % 2 == 0
    paired = set(complexes.tolist())
    for v in complexes:
        assert v.conjugate() in paired


def test_ritz_vectors_two_cycle():
    basis, hess = arnoldi_iterate(two_cycle_apply, np.array([1.0, 0.0]), 2)
    pairs = ritz_vectors(two_cycle_apply, basis, hess)
    assert pairs[0].value == pytest.approx(1.0)
    np.testing.assert_allclose(pairs[0].vector,
                               np.array([1.0, 1.0]) / np.sqrt(2), atol=1e-12)
    assert pairs[0].residual <= 1e-12
    assert pairs[1].value == pytest.approx(-1.0)
    np.testing.assert_allclose(pairs[1].vector,
                               np.array([1.0, -1.0]) / np.sqrt(2), atol=1e-12)
    assert pairs[1].phase == pytest.approx(np.pi)


def test_ritz_selection_out_of_range():
    basis, hess = arnoldi_iterate(two_cycle_apply, np.array([1.0, 0.0]), 2)
    with pytest.raises(ValidationError):
        ritz_vectors(two_cycle_apply, basis, hess, selection=[5])


def test_full_krylov_residuals_small():
    rng = np.random.default_rng(3)
    g = reciprocal_cycle_graph(rng, 60)
    decomp = detect_subspaces(g)
    pairs = core_spectrum(g, decomp, n_arnoldi=decomp.n_c, vectors="all")
    assert pairs
    assert all(p.residual <= 1e-8 for p in pairs)


def test_ritz_matches_dense_oracle_100_nodes():
    rng = np.random.default_rng(4)
    g = reciprocal_cycle_graph(rng, 100)
    decomp = detect_subspaces(g)
    op = build_stochastic(g)
    core = CoreOperator(op, decomp)
    start = np.full(core.n_core, 1.0 / core.n_core)
    basis, hess = arnoldi_iterate(core.apply, start, core.n_core,
                                  on_breakdown="continue",
                                  rng=np.random.default_rng(0))
    ritz = hessenberg_eigen(hess)
    dense = np.linalg.eigvals(dense_core_block(g, decomp))
    assert hausdorff(ritz, dense) <= 1e-8


def test_arnoldi_relation_and_orthonormality():
    rng = np.random.default_rng(5)
    g = reciprocal_cycle_graph(rng, 300)
    decomp = detect_subspaces(g)
    op = build_stochastic(g)
    core = CoreOperator(op, decomp)
    m = min(40, decomp.n_c)
    start = rng.standard_normal(core.n_core)
    basis, hess = arnoldi_iterate(core.apply, start, m)
    v = basis.vectors
    k = v.shape[1]
    gram = v.T @ v
    assert np.abs(gram - np.eye(k)).max() <= 1e-10
    # A V[:, :k-1] = V H[:k, :k-1] involves stored vectors only
    applied = np.column_stack([core.apply(v[:, j]) for j in range(k - 1)])
    err = np.linalg.norm(applied - v @ hess[:k, :k - 1], ord="fro")
    assert err <= 1e-9 * np.linalg.norm(hess, ord="fro")


def test_spectrum_conjugate_closed_and_bounded():
    rng = np.random.default_rng(6)
    for _ in range(5):
        g = reciprocal_cycle_graph(rng, int(rng.integers(30, 120)),
                                   reciprocity=float(rng.random()))
        decomp = detect_subspaces(g)
        pairs = core_spectrum(g, decomp, n_arnoldi=decomp.n_c, vectors="none")
        values = np.array([p.value for p in pairs])
        assert np.all(np.abs(values) <= 1.0 + 1e-9)
        complexes = values[values.imag != 0]
        paired = set(complexes.tolist())
        assert all(v.conjugate() in paired for v in complexes)


def test_core_spectrum_t3(t3):
    pairs = core_spectrum(t3, detect_subspaces(t3), n_arnoldi=1)
    assert len(pairs) == 1
    assert pairs[0].value == pytest.approx(1 / 3)
    assert pairs[0].order_index == 1
    vec = pairs[0].vector
    assert vec.shape == (3,)
    assert vec[0] == vec[1] == 0.0       # node-space embedding

def test_core_spectrum_deterministic_with_seed(t3):
    rng = np.random.default_rng(8)
    g = reciprocal_cycle_graph(rng, 50)
    decomp = detect_subspaces(g)
    a = core_spectrum(g, decomp, n_arnoldi=10, seed=7)
    b = core_spectrum(g, decomp, n_arnoldi=10, seed=7)
    for pa, pb in zip(a, b):
        assert pa.value == pb.value
        assert pa.residual == pb.residual
        if pa.vector is not None:
            assert np.array_equal(pa.vector, pb.vector)


def test_memory_budget_guard(t3):
    rng = np.random.default_rng(9)
    g = reciprocal_cycle_graph(rng, 50)
    decomp = detect_subspaces(g)
    with pytest.raises(CapacityError):
        core_spectrum(g, decomp, n_arnoldi=10, memory_budget=100)


def test_n_arnoldi_validation(t3):
    decomp = detect_subspaces(t3)
    with pytest.raises(ValidationError):
        core_spectrum(t3, decomp, n_arnoldi=2)   # core dimension is 1


def test_eigen_sort_tie_break():
    values = np.array([0.5 + 0.5j, 1.0, 0.5 - 0.5j, -1.0])
    ordered = values[eigen_sort_indices(values)]
    np.testing.assert_array_equal(
        ordered, np.array([1.0, -1.0, 0.5 - 0.5j, 0.5 + 0.5j])
    )
