"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line (run pytest with -s, or read the captured output, to see them).

Criteria 1 and 5 compare eigenvalue multisets produced by two different
eigensolvers, which is only meaningful when the spectra are well
conditioned; the random graphs here come from a cycle-cover family with
reciprocal extra links (see oracles.reciprocal_cycle_graph) precisely so
that defective clusters cannot blur the comparison. Criterion 10 runs in
a subprocess so its 4 GB working set cannot disturb the main runner.
"""

import json
import subprocess
import sys
import textwrap
import time

import numpy as np
import pytest

from netspectra import (
    DirectedGraph,
    build_stochastic,
    cheirank,
    core_spectrum,
    correlator,
    count_unit_eigenvalues,
    cut_counts,
    decay_exponent,
    density_grid,
    detect_subspaces,
    ipr,
    pagerank,
    pagerank_near_one,
    subspace_spectrum,
    zipf_fit,
)
from netspectra.cli import main
from netspectra.ranking import RankVector

from oracles import (
    brute_force_cut_counts,
    dense_core_block,
    dense_google,
    dense_pagerank,
    dense_stochastic,
    hausdorff,
    matched_distance,
    reciprocal_cycle_graph,
)


def report(criterion, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_dense_oracle_spectrum_equivalence():
    start = time.time()
    worst = 0.0
    graphs = 0
    for seed in range(24):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(30, 200))
        g = reciprocal_cycle_graph(
            rng, n,
            reciprocity=float(0.7 + 0.3 * rng.random()),
            dangling_fraction=float(0.05 + 0.3 * rng.random()),
        )
        decomp = detect_subspaces(g)
        if decomp.n_c < 3:
            continue
        graphs += 1
        pairs = core_spectrum(g, decomp, n_arnoldi=decomp.n_c, vectors="none")
        ritz = np.array([p.value for p in pairs])
        dense = np.linalg.eigvals(dense_core_block(g, decomp))
        worst = max(worst, hausdorff(ritz, dense))
    elapsed = time.time() - start
    report(
        1, graphs >= 20 and worst <= 1e-8 and elapsed < 60,
        f"{graphs} graphs, worst Hausdorff {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_2_subspace_exactness(t3, two_cycles_dangling,
                                         nested_closure):
    cases = [
        (t3, (2, 1, 2)),
        (two_cycles_dangling, (4, 2, 2)),
        (nested_closure, (3, 1, 3)),
    ]
    max_fixed_point_err = 0.0
    for g, (n_s, n_d, d_max) in cases:
        decomp = detect_subspaces(g)      # closure asserted internally
        assert (decomp.n_s, decomp.n_d, decomp.d_max) == (n_s, n_d, d_max)
        op = build_stochastic(g)
        spectra = subspace_spectrum(op, decomp)
        n_circ, n_1 = count_unit_eigenvalues(spectra)
        assert n_1 >= decomp.n_d
        for block in spectra.blocks:
            for value, vec in zip(block.eigenvalues, block.eigenvectors.T):
                if abs(value - 1.0) <= 1e-10:
                    psi = np.zeros(g.n, dtype=np.complex128)
                    psi[block.nodes] = vec
                    err = float(np.abs(op.apply_complex(psi, 1.0) - psi).sum())
                    max_fixed_point_err = max(max_fixed_point_err, err)
    report(
        2, max_fixed_point_err <= 1e-10,
        f"hand-derived counts exact on 3 fixtures; "
        f"worst ||S psi - psi||_1 = {max_fixed_point_err:.2e}",
    )


def test_criterion_3_pagerank_contract(t3):
    rv = pagerank(build_stochastic(t3), 0.85, tol=1e-12)
    component_err = np.abs(
        rv.probabilities - np.array([0.46512, 0.46512, 0.06977])
    ).max()
    oracle_err = np.abs(rv.probabilities - dense_pagerank(t3, 0.85)).max()
    worst_residual = rv.residual
    worst_iters = rv.iterations
    rng = np.random.default_rng(123)
    for seed in range(10):
        g = reciprocal_cycle_graph(
            rng, int(rng.integers(10, 150)),
            reciprocity=float(rng.random()),
            dangling_fraction=float(0.05 + 0.4 * rng.random()),
        )
        out = pagerank(build_stochastic(g), 0.85, tol=1e-12)
        worst_residual = max(worst_residual, out.residual)
        worst_iters = max(worst_iters, out.iterations)
    ok = (
        component_err <= 1e-5 and oracle_err <= 1e-6
        and worst_residual <= 1e-11 and worst_iters <= 400
    )
    report(
        3, ok,
        f"T3 vs dense {oracle_err:.2e}, worst residual {worst_residual:.2e},"
        f" worst iterations {worst_iters}",
    )


def test_criterion_4_near_one_subspace_concentration(t3, two_cycles_dangling):
    alpha = 1.0 - 1e-8
    worst_mass = 1.0
    worst_vs_dense = 0.0
    fixtures = [t3, two_cycles_dangling]
    rng = np.random.default_rng(7)
    for _ in range(4):
        g = reciprocal_cycle_graph(rng, int(rng.integers(10, 50)),
                                   dangling_fraction=0.2, feeders=1)
        if detect_subspaces(g).n_s > 0:
            fixtures.append(g)
    for g in fixtures:
        if g.n > 50:
            continue
        decomp = detect_subspaces(g)
        if decomp.n_s == 0:
            continue
        rv = pagerank_near_one(build_stochastic(g), decomp, alpha)
        worst_mass = min(worst_mass, rv.mass_on_subspaces)
        oracle = dense_pagerank(g, alpha)
        worst_vs_dense = max(
            worst_vs_dense, float(np.abs(rv.probabilities - oracle).sum())
        )
    ok = worst_mass >= 1.0 - 1e-6 and worst_vs_dense <= 1e-8
    report(
        4, ok,
        f"min mass_on_subspaces {worst_mass:.9f}, "
        f"worst L1 gap to dense solve {worst_vs_dense:.2e}",
    )


def test_criterion_5_rescaling_property():
    worst = 0.0
    rng_master = np.random.default_rng(99)
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 100))
        g = reciprocal_cycle_graph(
            rng, n, reciprocity=1.0,
            dangling_fraction=float(0.05 + 0.25 * rng_master.random()),
        )
        S = dense_stochastic(g)
        G = dense_google(S, 0.85)
        e_s = np.linalg.eigvals(S)
        e_g = np.linalg.eigvals(G)
        e_s = np.delete(e_s, np.argmin(np.abs(e_s - 1.0)))
        e_g = np.delete(e_g, np.argmin(np.abs(e_g - 1.0)))
        worst = max(worst, matched_distance(e_g, 0.85 * e_s))
    report(5, worst <= 1e-10,
           f"20 graphs, worst |eig(G) - 0.85 eig(S)| = {worst:.2e}")


def test_criterion_6_metric_formulas():
    n = 64
    uniform = np.full(n, 1.0 / n)
    delta = np.zeros(n)
    delta[3] = 1.0
    kappa_ok = (
        abs(correlator(uniform, uniform)) <= 1e-12
        and abs(correlator(delta, delta) - (n - 1)) <= 1e-12
    )
    ipr_ok = (
        abs(ipr(uniform) - n) <= 1e-9
        and ipr(delta) == pytest.approx(1.0, abs=1e-12)
        and ipr(np.array([1.0, 1.0] + [0.0] * 30)) == pytest.approx(
            2.0, abs=1e-12)
    )
    psi = np.arange(1, 20_001, dtype=float) ** -0.6
    decay = decay_exponent(psi)
    p = np.arange(1, 50_001, dtype=float) ** -0.85
    p /= p.sum()
    zipf = zipf_fit(RankVector.from_probabilities(p, 0.85, 1, 0.0), 10, 1000)
    fits_ok = (
        abs(decay.exponent - (-0.6)) <= 1e-6
        and abs(zipf.exponent - 0.85) <= 0.01
    )
    report(
        6, kappa_ok and ipr_ok and fits_ok,
        f"kappa/IPR fixtures exact; decay err {abs(decay.exponent + 0.6):.1e},"
        f" zipf err {abs(zipf.exponent - 0.85):.1e}",
    )


def test_criterion_7_cut_count_equivalence():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(50):
        n = int(rng.integers(2, 100))
        g = reciprocal_cycle_graph(
            rng, max(n, 4), covers=1,
            reciprocity=float(rng.random()),
            dangling_fraction=float(rng.random() * 0.4),
        )
        order = rng.permutation(g.n)
        cc = cut_counts(g, order)
        aa, ab, ba = brute_force_cut_counts(g, order)
        assert np.array_equal(cc.n_aa, aa)
        assert np.array_equal(cc.n_ab, ab)
        assert np.array_equal(cc.n_ba, ba)
        assert np.all(cc.n_aa + cc.n_ab + cc.n_ba + cc.n_bb == g.link_count)
        checked += 1
    report(7, checked == 50,
           f"{checked} random graphs match the per-cut recount oracle")


def test_criterion_8_density_normalization():
    rng = np.random.default_rng(11)
    worst_norm = 0.0
    for n in (10**3, 10**5):
        ka = rng.permutation(n) + 1
        kb = rng.permutation(n) + 1
        for scale in ("linear", "log"):
            grid = density_grid(ka, kb, 100, scale)
            worst_norm = max(worst_norm, abs(float(grid.weights.sum()) - 1.0))
            members = int(np.round(grid.weights * n).sum())
            assert members == n
    report(8, worst_norm <= 1e-12,
           f"N in {{1e3, 1e5}}, worst |sum W - 1| = {worst_norm:.2e}")


def test_criterion_9_pipeline_determinism(tmp_path):
    edges = tmp_path / "graph.txt"
    rng = np.random.default_rng(21)
    g = reciprocal_cycle_graph(rng, 40, dangling_fraction=0.2)
    src, dst = g.edge_arrays()
    edges.write_text("".join(f"{s} {d}\n" for s, d in zip(src, dst)))
    labels = tmp_path / "labels.tsv"
    labels.write_text("".join(f"{i}\tnode number {i}\n" for i in range(g.n)))
    digests = []
    for tag in ("run1", "run2"):
        out = tmp_path / tag
        code = main([
            "pipeline", "--edges", str(edges), "--labels", str(labels),
            "--n-arnoldi", "10", "--seed", "3", "--near-one",
            "--out", str(out),
        ])
        assert code == 0
        digests.append({
            p.name: p.read_bytes() for p in sorted(out.iterdir())
        })
    same = digests[0].keys() == digests[1].keys() and all(
        digests[0][k] == digests[1][k] for k in digests[0]
    )
    report(9, same,
           f"{len(digests[0])} pipeline output files byte-identical")


SCALE_SCRIPT = textwrap.dedent("""
    import json, time, resource
    import numpy as np
    from netspectra.synthetic import scale_free_graph
    from netspectra import build_stochastic, pagerank, detect_subspaces
    from netspectra.arnoldi import arnoldi_iterate, hessenberg_eigen
    from netspectra.operators import CoreOperator

    g = scale_free_graph(10**6, mean_out_degree=24.0,
                         dangling_fraction=0.1, seed=1)
    t0 = time.time()
    rv = pagerank(build_stochastic(g), 0.85, tol=1e-12)
    pagerank_seconds = time.time() - t0
    decomp = detect_subspaces(g)
    core = CoreOperator(build_stochastic(g), decomp)
    budget = 5 * 1024**3
    need = (500 + 1) * core.n_core * 8
    t0 = time.time()
    basis, hess = arnoldi_iterate(
        core.apply, np.full(core.n_core, 1.0 / core.n_core), 500,
        on_breakdown="continue", rng=np.random.default_rng(0))
    ritz = hessenberg_eigen(hess)
    arnoldi_seconds = time.time() - t0
    print(json.dumps({
        "links": g.link_count,
        "pagerank_seconds": pagerank_seconds,
        "pagerank_iterations": rv.iterations,
        "pagerank_residual": rv.residual,
        "core_dimension": core.n_core,
        "basis_bytes": need,
        "within_budget": bool(need <= budget),
        "arnoldi_seconds": arnoldi_seconds,
        "leading_ritz_abs": float(abs(ritz[0])),
        "peak_rss_gb": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss/1e6,
    }))
""")


def test_criterion_10_scale_smoke():
    proc = subprocess.run(
        [sys.executable, "-c", SCALE_SCRIPT],
        capture_output=True, text=True, timeout=3600,
    )
    assert proc.returncode == 0, f"scale run failed: {proc.stderr[-2000:]}"
    result = json.loads(proc.stdout.strip().splitlines()[-1])
    ok = (
        result["links"] >= 1.5e7
        and result["pagerank_seconds"] < 300
        and result["pagerank_residual"] <= 1e-11
        and result["within_budget"]
        and result["leading_ritz_abs"] <= 1.0 + 1e-9
    )
    report(
        10, ok,
        f"N=1e6, N_l={result['links']:.2e}: pagerank "
        f"{result['pagerank_seconds']:.1f}s, arnoldi(n_A=500) "
        f"{result['arnoldi_seconds']:.0f}s within "
        f"{result['basis_bytes']/2**30:.1f} GiB basis, peak RSS "
        f"{result['peak_rss_gb']:.1f} GB",
    )


@pytest.mark.skipif(
    "NETSPECTRA_WIKI_EDGES" not in __import__("os").environ,
    reason="criterion 11 is conditional: set NETSPECTRA_WIKI_EDGES to a "
           "Wikipedia-class edge list to enable dataset reproduction",
)
def test_criterion_11_dataset_reproduction():
    import os

    from netspectra import load_edge_list

    g = load_edge_list(os.environ["NETSPECTRA_WIKI_EDGES"])
    rv = pagerank(build_stochastic(g), 0.85, tol=1e-10)
    fit = zipf_fit(rv, 10, g.n // 100)
    decomp = detect_subspaces(g)
    pairs = core_spectrum(g, decomp, n_arnoldi=min(500, decomp.n_c),
                          vectors="none")
    lambda_1 = abs(pairs[0].value)
    pstar = cheirank(g, 0.85, tol=1e-10)
    kappa = correlator(rv, pstar)
    ok = (
        abs(fit.exponent - 0.96) <= 0.05
        and lambda_1 > 0.999
        and abs(kappa - 4.08) <= 0.2 * 4.08
    )
    report(11, ok,
           f"beta={fit.exponent:.3f} (target 0.96 +/- 0.05), "
           f"lambda_1={lambda_1:.8f}, kappa={kappa:.2f}")
