"""Command-line surface: one subcommand per stage of the analysis, with
deterministic machine-readable outputs.

Exit codes: 0 success, 1 compute failure (non-convergence, capacity,
numerics), 2 input or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis as an
from . import arnoldi as ar
from . import graphs as gr
from . import ranking as rk
from . import subspaces as sub
from .errors import (
    CapacityError,
    ConvergenceError,
    DimensionError,
    EdgeListParseError,
    EigenSolverError,
    IdRangeError,
    NetspectraError,
    NumericError,
    ValidationError,
)
from .operators import StochasticOperator

INPUT_ERRORS = (EdgeListParseError, IdRangeError, ValidationError, OSError)
COMPUTE_ERRORS = (ConvergenceError, CapacityError, NumericError,
                  DimensionError, EigenSolverError)


@dataclass
class RunConfig:
    command: str
    edges: Path
    labels: Path | None
    index_base: int
    alpha: float
    n_arnoldi: int
    tol: float | None
    seed: int | None
    direction: str
    out: Path | None
    format: str
    threads: int
    near_one: bool
    vectors: list[int]
    top_eigenvectors: int
    cells: int
    cut_subsample: int


def fmt9(x) -> str:
    """All floating-point output carries 9 significant digits."""
    return f"{float(x):.9g}"


def _round9(obj):
    if isinstance(obj, float):
        return float(fmt9(obj))
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(fmt9(float(obj)))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path: Path, payload) -> None:
    write_text_atomic(
        path, json.dumps(_round9(payload), sort_keys=True, indent=2) + "\n"
    )


def write_table(out_dir: Path, name: str, header: list[str], rows,
                fmt: str) -> Path:
    """Rows carry native values; floats get the 9-digit treatment here."""
    if fmt == "json":
        path = out_dir / f"{name}.json"
        payload = [dict(zip(header, row)) for row in rows]
        write_json(path, payload)
        return path
    path = out_dir / f"{name}.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([
            fmt9(v) if isinstance(v, (float, np.floating)) else v
            for v in row
        ])
    write_text_atomic(path, buf.getvalue())
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netspectra",
        description="Spectral analysis of large directed networks",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("stats", "node/link/dangling counts of the graph"),
        ("subspaces", "invariant-subspace classification"),
        ("spectrum", "subspace spectra plus core Arnoldi spectrum"),
        ("rank", "PageRank and CheiRank with decay-exponent fits"),
        ("analyze", "correlator, density grids, cut counts, communities"),
        ("pipeline", "run every stage into one output directory"),
    ]:
        cmd = commands.add_parser(name, help=doc)
        cmd.add_argument("--edges", required=True, help="edge list file")
        cmd.add_argument("--labels", default=None, help="id<TAB>label file")
        cmd.add_argument("--base", type=int, default=0, choices=(0, 1),
                         help="node id base of the edge file")
        cmd.add_argument("--alpha", type=float, default=0.85)
        cmd.add_argument("--n-arnoldi", type=int, default=100)
        cmd.add_argument("--tol", type=float, default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--direction", choices=("fwd", "inv"), default="fwd")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv")
        cmd.add_argument("--threads", type=int, default=1)
        cmd.add_argument("--near-one", action="store_true",
                         help="also solve PageRank at alpha = 1 - 1e-8")
        cmd.add_argument("--vectors", default="",
                         help="comma-separated core eigenvector indices to export")
        cmd.add_argument("--top-eigenvectors", type=int, default=4)
        cmd.add_argument("--cells", type=int, default=100,
                         help="density grid cells per axis")
        cmd.add_argument("--cut-subsample", type=int, default=0,
                         help="emit this many log-spaced cut rows (0 = all)")
    return parser


def parse_config(args) -> RunConfig:
    edges = Path(args.edges)
    if not edges.is_file():
        raise ValidationError(f"edge file not found: {edges}")
    labels = Path(args.labels) if args.labels else None
    if labels is not None and not labels.is_file():
        raise ValidationError(f"label file not found: {labels}")
    if not 0.0 <= args.alpha <= 1.0:
        raise ValidationError(f"alpha={args.alpha} outside [0, 1]")
    if args.n_arnoldi < 1:
        raise ValidationError("n-arnoldi must be at least 1")
    if args.tol is not None and args.tol <= 0:
        raise ValidationError("tol must be positive")
    if args.threads < 1:
        raise ValidationError("threads must be at least 1")
    if args.top_eigenvectors < 0:
        raise ValidationError("top-eigenvectors must be nonnegative")
    if args.cells < 1:
        raise ValidationError("cells must be at least 1")
    if args.cut_subsample < 0:
        raise ValidationError("cut-subsample must be nonnegative")
    try:
        vectors = [int(tok) for tok in args.vectors.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"bad --vectors list: {args.vectors!r}") from None
    if any(m < 1 for m in vectors):
        raise ValidationError("--vectors indices are 1-based")
    out = Path(args.out) if args.out else None
    needs_out = args.command != "stats"
    if needs_out and out is None:
        raise ValidationError(f"--out is required for {args.command}")
    return RunConfig(
        command=args.command,
        edges=edges,
        labels=labels,
        index_base=args.base,
        alpha=args.alpha,
        n_arnoldi=args.n_arnoldi,
        tol=args.tol,
        seed=args.seed,
        direction={"fwd": "forward", "inv": "inverse"}[args.direction],
        out=out,
        format=args.format,
        threads=args.threads,
        near_one=args.near_one,
        vectors=vectors,
        top_eigenvectors=args.top_eigenvectors,
        cells=args.cells,
        cut_subsample=args.cut_subsample,
    )


def load_graph(cfg: RunConfig) -> gr.DirectedGraph:
    g = gr.load_edge_list(cfg.edges, index_base=cfg.index_base)
    if cfg.labels is not None:
        table = gr.load_labels(cfg.labels)
        if table.duplicate_count:
            print(f"warning: {table.duplicate_count} duplicate label ids "
                  f"(last occurrence wins)", file=sys.stderr)
        g = gr.attach_labels(g, table)
    return g


def stats_payload(g) -> dict:
    st = gr.graph_stats(g)
    return {
        "N": st.node_count,
        "N_l": st.link_count,
        "dangling": st.dangling_count,
        "zeta": st.links_per_node,
    }


def cmd_stats(cfg: RunConfig) -> int:
    g = load_graph(cfg)
    payload = stats_payload(g)
    print(json.dumps(_round9(payload), sort_keys=True))
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        write_json(cfg.out / "stats.json", payload)
    return 0


def _classification_rows(decomp):
    for node in range(decomp.n):
        tag = decomp.classification[node]
        yield node, "core" if tag < 0 else f"s{tag}"


def _spectrum_rows(values, residuals):
    for m, (value, res) in enumerate(zip(values, residuals), start=1):
        phase = an.eigenvalue_phase(value) if value != 0 else 0.0
        yield (m, value.real, value.imag, abs(value), phase, float(res))


def _subspace_eigen_rows(spectra: sub.SubspaceSpectrum, op):
    values = []
    residuals = []
    for block in spectra.blocks:
        matrix = sub.subspace_block_matrix(op, block.nodes)
        for value, vec in zip(block.eigenvalues, block.eigenvectors.T):
            values.append(value)
            residuals.append(
                float(np.linalg.norm(matrix @ vec - value * vec))
            )
    if not values:
        return [], []
    values = np.array(values)
    residuals = np.array(residuals)
    order = ar.eigen_sort_indices(values)
    return values[order], residuals[order]


def decompose(cfg: RunConfig, g):
    decomp = sub.detect_subspaces(g, direction=cfg.direction)
    op = StochasticOperator(g, cfg.direction)
    return op, decomp


def cmd_subspaces(cfg: RunConfig) -> int:
    g = load_graph(cfg)
    op, decomp = decompose(cfg, g)
    spectra = sub.subspace_spectrum(op, decomp, threads=cfg.threads)
    n_circ, n_1 = sub.count_unit_eigenvalues(spectra)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_table(cfg.out, "classes", ["node_id", "class"],
                _classification_rows(decomp), cfg.format)
    write_json(cfg.out / "subspace_summary.json", {
        "N_s": decomp.n_s, "N_c": decomp.n_c, "N_d": decomp.n_d,
        "d_max": decomp.d_max, "N_circ": n_circ, "N_1": n_1,
        "oversized_to_core": decomp.oversized_to_core,
        "direction": decomp.direction,
    })
    return 0


def _core_pairs(cfg: RunConfig, g, decomp, vectors_mode="converged"):
    n_arnoldi = cfg.n_arnoldi
    if decomp.n_c == 0:
        return []
    if n_arnoldi > decomp.n_c:
        print(f"warning: n-arnoldi {n_arnoldi} clamped to core dimension "
              f"{decomp.n_c}", file=sys.stderr)
        n_arnoldi = decomp.n_c
    return ar.core_spectrum(
        g, decomp, direction=cfg.direction, n_arnoldi=n_arnoldi,
        seed=cfg.seed, vectors=vectors_mode,
    )


def cmd_spectrum(cfg: RunConfig) -> int:
    g = load_graph(cfg)
    op, decomp = decompose(cfg, g)
    spectra = sub.subspace_spectrum(op, decomp, threads=cfg.threads)
    n_circ, n_1 = sub.count_unit_eigenvalues(spectra)
    pairs = _core_pairs(cfg, g, decomp)
    cfg.out.mkdir(parents=True, exist_ok=True)

    values, residuals = _subspace_eigen_rows(spectra, op)
    write_table(cfg.out, "subspace_spectrum",
                ["m", "re_lambda", "im_lambda", "abs_lambda", "phase",
                 "residual"],
                _spectrum_rows(values, residuals), cfg.format)
    write_table(cfg.out, "core_spectrum",
                ["m", "re_lambda", "im_lambda", "abs_lambda", "phase",
                 "residual"],
                ((p.order_index, p.value.real, p.value.imag,
                  abs(p.value), p.phase, p.residual)
                 for p in pairs), cfg.format)
    summary = {
        "N": g.n, "N_l": g.link_count,
        "N_s": decomp.n_s, "N_c": decomp.n_c, "N_d": decomp.n_d,
        "d_max": decomp.d_max, "N_circ": n_circ, "N_1": n_1,
        "direction": decomp.direction,
        "n_arnoldi": min(cfg.n_arnoldi, decomp.n_c),
        "core_eigenvalues": len(pairs),
    }
    if pairs:
        summary["lambda_1"] = {"re": pairs[0].value.real,
                               "im": pairs[0].value.imag,
                               "abs": abs(pairs[0].value)}
    write_json(cfg.out / "spectrum_summary.json", summary)

    available = {p.order_index: p for p in pairs if p.vector is not None}
    for m in cfg.vectors:
        pair = available.get(m)
        if pair is None:
            print(f"warning: eigenvector m={m} not available "
                  f"(unconverged or out of range); skipped", file=sys.stderr)
            continue
        write_table(cfg.out, f"eigenvector_{m:04d}",
                    ["node_id", "re_psi", "im_psi"],
                    ((node, pair.vector[node].real, pair.vector[node].imag)
                     for node in range(g.n)), cfg.format)
    return 0


def _rank_rows(rv, labels):
    has_labels = labels is not None
    for pos, node in enumerate(rv.order, start=1):
        row = [pos, int(node), float(rv.probabilities[node])]
        if has_labels:
            row.append(labels.get(int(node), f"node:{int(node)}"))
        yield row


def _fit_payload(rv) -> dict:
    try:
        fit = rk.zipf_fit(rv)
    except ValidationError as exc:
        return {"fit": None, "fit_error": str(exc)}
    return {"fit": {"exponent": fit.exponent, "stderr": fit.stderr,
                    "k_min": fit.k_min, "k_max": fit.k_max,
                    "points_used": fit.points_used}}


def compute_ranks(cfg: RunConfig, g):
    tol = cfg.tol if cfg.tol is not None else 1e-12
    fwd = StochasticOperator(g, "forward")
    p = rk.pagerank(fwd, cfg.alpha, tol=tol)
    pstar = rk.cheirank(g, cfg.alpha, tol=tol)
    return p, pstar


def cmd_rank(cfg: RunConfig) -> int:
    g = load_graph(cfg)
    p, pstar = compute_ranks(cfg, g)
    labels = g.labels
    cfg.out.mkdir(parents=True, exist_ok=True)
    header = ["rank", "node_id", "probability"]
    if labels is not None:
        header = header + ["label"]
    write_table(cfg.out, "pagerank", header, _rank_rows(p, labels), cfg.format)
    write_table(cfg.out, "cheirank", header, _rank_rows(pstar, labels),
                cfg.format)
    report = {
        "alpha": cfg.alpha,
        "pagerank": {"iterations": p.iterations, "residual": p.residual,
                     **_fit_payload(p)},
        "cheirank": {"iterations": pstar.iterations,
                     "residual": pstar.residual, **_fit_payload(pstar)},
    }
    if cfg.near_one:
        alpha1 = 1.0 - 1e-8
        tol1 = cfg.tol if cfg.tol is not None else 1e-10
        op = StochasticOperator(g, "forward")
        decomp = sub.detect_subspaces(g, direction="forward")
        near = rk.pagerank_near_one(op, decomp, alpha1, tol=tol1)
        write_table(cfg.out, "pagerank_near_one", header,
                    _rank_rows(near, labels), cfg.format)
        report["near_one"] = {
            "alpha": alpha1,
            "mass_on_subspaces": near.mass_on_subspaces,
            "iterations": near.iterations,
            "residual": near.residual,
        }
    write_json(cfg.out / "rank_report.json", report)
    return 0


def _cut_rows(counts: an.CutCounts, subsample: int):
    n = counts.n_aa.shape[0]
    if subsample <= 0 or subsample >= n:
        cuts = np.arange(1, n + 1)
    else:
        # logarithmically equidistant cut positions, endpoints included
        cuts = np.unique(np.round(
            np.logspace(0.0, np.log10(n), subsample)
        ).astype(np.int64).clip(1, n))
    n_bb = counts.n_bb
    for k in cuts:
        i = int(k) - 1
        yield (int(k), int(counts.n_aa[i]), int(counts.n_ab[i]),
               int(counts.n_ba[i]), int(n_bb[i]))


def cmd_analyze(cfg: RunConfig) -> int:
    g = load_graph(cfg)
    if g.labels is None:
        print("warning: no labels supplied; community reports fall back to "
              "node:<id> tokens", file=sys.stderr)
    p, pstar = compute_ranks(cfg, g)
    kappa = an.correlator(p, pstar)
    cfg.out.mkdir(parents=True, exist_ok=True)

    for scale in ("linear", "log"):
        grid = an.density_grid(p.ranks, pstar.ranks, cfg.cells, scale)
        rows = (
            (ix, iy, float(grid.weights[ix, iy]))
            for ix in range(cfg.cells) for iy in range(cfg.cells)
            if grid.weights[ix, iy] > 0.0
        )
        write_table(cfg.out, f"density_{scale}", ["cell_x", "cell_y", "weight"],
                    rows, cfg.format)
        write_json(cfg.out / f"density_{scale}.meta.json", {
            "scale": scale, "cells_per_axis": cfg.cells,
            "x_edges": list(grid.x_edges), "y_edges": list(grid.y_edges),
            "normalization": float(grid.weights.sum()),
        })

    cut_header = ["K", "N_AA", "N_AB", "N_BA", "N_BB"]
    write_table(cfg.out, "cutcounts_pagerank", cut_header,
                _cut_rows(an.cut_counts(g, p.order), cfg.cut_subsample),
                cfg.format)

    op, decomp = decompose(cfg, g)
    communities = []
    if cfg.top_eigenvectors > 0 and decomp.n_c > 0:
        pairs = _core_pairs(cfg, g, decomp)
        withvec = [q for q in pairs if q.vector is not None]
        for pair in an.select_near_circle(withvec, cfg.top_eigenvectors):
            order = an.rank_order(pair.vector)
            write_table(cfg.out, f"cutcounts_eig_{pair.order_index:04d}",
                        cut_header,
                        _cut_rows(an.cut_counts(g, order), cfg.cut_subsample),
                        cfg.format)
            top = an.top_nodes(pair.vector, g.labels, 20)
            words = an.word_frequency(
                [lbl for _, _, _, lbl in
                 an.top_nodes(pair.vector, g.labels, 1000)]
            )
            try:
                decay = an.decay_exponent(pair.vector)
                decay_payload = {"exponent": decay.exponent,
                                 "stderr": decay.stderr,
                                 "k_min": decay.k_min, "k_max": decay.k_max}
            except ValidationError:
                decay_payload = None
            communities.append({
                "m": pair.order_index,
                "re": pair.value.real,
                "im": pair.value.imag,
                "abs": abs(pair.value),
                "phase": pair.phase,
                "residual": pair.residual,
                "ipr": an.ipr(pair.vector),
                "decay": decay_payload,
                "top_word": words[0][0] if words else None,
                "top_20_nodes": [
                    {"K_i": k, "node_id": node, "modulus": mag, "label": lbl}
                    for k, node, mag, lbl in top
                ],
            })
    write_json(cfg.out / "analysis.json", {
        "alpha": cfg.alpha,
        "kappa": kappa,
        "density_cells": cfg.cells,
        "communities": communities,
    })
    return 0


def cmd_pipeline(cfg: RunConfig) -> int:
    g = load_graph(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_json(cfg.out / "stats.json", stats_payload(g))
    cmd_subspaces(cfg)
    cmd_spectrum(cfg)
    cmd_rank(cfg)
    cmd_analyze(cfg)
    return 0


COMMANDS = {
    "stats": cmd_stats,
    "subspaces": cmd_subspaces,
    "spectrum": cmd_spectrum,
    "rank": cmd_rank,
    "analyze": cmd_analyze,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args)
    except ValidationError as exc:
        print(json.dumps({"error": str(exc), "type": "ValidationError"}),
              file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.command](cfg)
    except INPUT_ERRORS as exc:
        print(json.dumps({"error": str(exc),
                          "type": type(exc).__name__}), file=sys.stderr)
        return 2
    except COMPUTE_ERRORS as exc:
        payload = {"error": str(exc), "type": type(exc).__name__}
        if isinstance(exc, ConvergenceError) and exc.residual is not None:
            payload["residual"] = exc.residual
            payload["iterations"] = exc.iterations
        print(json.dumps(_round9(payload)), file=sys.stderr)
        return 1
    except NetspectraError as exc:
        print(json.dumps({"error": str(exc),
                          "type": type(exc).__name__}), file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
