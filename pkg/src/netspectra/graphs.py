"""Directed-graph loading, validation, persistence, and summary counts.

Graphs are stored as compressed adjacency in both directions (out-links
and in-links), with duplicate edges collapsed at construction and
self-loops retained. Node ids are dense integers in [0, N).
"""

from __future__ import annotations

import io
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EdgeListParseError, IdRangeError

CACHE_MAGIC = b"NSGRAPH1"


class DirectedGraph:
    """Immutable directed graph over nodes 0..N-1.

    Parameters are the prebuilt compressed-adjacency arrays; use
    :meth:`from_edge_arrays` or :func:`load_edge_list` to construct one
    from raw edges.
    """

    def __init__(self, n, out_ptr, out_to, in_ptr, in_from, labels=None):
        self.n = int(n)
        self.out_ptr = out_ptr
        self.out_to = out_to
        self.in_ptr = in_ptr
        self.in_from = in_from
        self.labels = labels
        self._out_degree = None
        self._in_degree = None

    @classmethod
    def from_edge_arrays(cls, src, dst, n=None, labels=None) -> "DirectedGraph":
        """Build a graph from parallel source/destination id arrays.

        Duplicate (src, dst) pairs are collapsed. N defaults to one more
        than the largest id seen; pass `n` to keep trailing isolated nodes.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have equal length")
        if src.size == 0 and n is None:
            raise ValueError("cannot infer node count from an empty edge set")
        if src.size and (src.min() < 0 or dst.min() < 0):
            raise IdRangeError("negative node id in edge list")
        max_id = int(max(src.max(), dst.max())) if src.size else -1
        if n is None:
            n = max_id + 1
        elif max_id >= n:
            raise IdRangeError(f"edge endpoint {max_id} outside [0, {n})")
        n = int(n)
        src, dst = _dedup_edges(src, dst)
        out_ptr, out_to = _build_csr(src, dst, n)
        in_ptr, in_from = _build_csr(dst, src, n)
        return cls(n, out_ptr, out_to, in_ptr, in_from, labels=labels)

    @classmethod
    def from_edges(cls, edges, n=None, labels=None) -> "DirectedGraph":
        """Convenience constructor from an iterable of (src, dst) pairs."""
        pairs = list(edges)
        if pairs:
            arr = np.asarray(pairs, dtype=np.int64).reshape(len(pairs), 2)
            return cls.from_edge_arrays(arr[:, 0], arr[:, 1], n=n, labels=labels)
        return cls.from_edge_arrays(
            np.empty(0, np.int64), np.empty(0, np.int64), n=n, labels=labels
        )

    @property
    def link_count(self) -> int:
        return int(self.out_to.shape[0])

    @property
    def out_degree(self) -> np.ndarray:
        if self._out_degree is None:
            self._out_degree = np.diff(self.out_ptr)
        return self._out_degree

    @property
    def in_degree(self) -> np.ndarray:
        if self._in_degree is None:
            self._in_degree = np.diff(self.in_ptr)
        return self._in_degree

    def out_neighbors(self, u) -> np.ndarray:
        return self.out_to[self.out_ptr[u]:self.out_ptr[u + 1]]

    def in_neighbors(self, u) -> np.ndarray:
        return self.in_from[self.in_ptr[u]:self.in_ptr[u + 1]]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All edges as (src, dst) arrays in canonical (src, dst) order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree)
        return src, self.out_to.copy()

    def transpose(self) -> "DirectedGraph":
        """Graph with every link direction inverted; shares adjacency arrays."""
        return DirectedGraph(
            self.n, self.in_ptr, self.in_from, self.out_ptr, self.out_to,
            labels=self.labels,
        )

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_to, other.out_to)
        )

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, links={self.link_count})"


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    link_count: int
    dangling_count: int
    links_per_node: float


@dataclass(frozen=True)
class LabelTable:
    labels: dict[int, str]
    duplicate_count: int


def _dedup_edges(src, dst):
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    if src.size:
        keep = np.empty(src.size, dtype=bool)
        keep[0] = True
        np.not_equal(src[1:], src[:-1], out=keep[1:])
        keep[1:] |= dst[1:] != dst[:-1]
        src = src[keep]
        dst = dst[keep]
    return src, dst


def _build_csr(key, val, n):
    """CSR arrays for edges already sorted by (key, val)."""
    order = np.lexsort((val, key))
    key = key[order]
    val = val[order]
    counts = np.bincount(key, minlength=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, np.ascontiguousarray(val)


def load_edge_list(source, index_base=0, comment_prefix="#") -> DirectedGraph:
    """Parse a whitespace-separated "src dst" edge list into a graph.

    `source` may be a path or a readable (text or binary) stream. Lines
    starting with `comment_prefix` are ignored. Node ids are shifted by
    `index_base`; N is one more than the largest adjusted id.
    """
    if index_base not in (0, 1):
        raise ValueError("index_base must be 0 or 1")
    text = _read_text(source)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")   # empty input raises below anyway
            data = np.loadtxt(
                io.StringIO(text), dtype=np.int64, comments=comment_prefix,
                ndmin=2,
            )
    except ValueError:
        _rescan_for_error(text, comment_prefix)
        raise EdgeListParseError("malformed edge list")
    if data.size == 0:
        raise EdgeListParseError("edge list contains no edges")
    if data.shape[1] != 2:
        _rescan_for_error(text, comment_prefix)
        raise EdgeListParseError("expected two integers per line")
    src = data[:, 0] - index_base
    dst = data[:, 1] - index_base
    low = min(int(src.min()), int(dst.min()))
    if low < 0:
        raise IdRangeError(
            f"node id {low} negative after subtracting index base {index_base}"
        )
    return DirectedGraph.from_edge_arrays(src, dst)


def _read_text(source) -> str:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read().decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _rescan_for_error(text, comment_prefix):
    """Locate the first bad line so parse errors carry a line number."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(comment_prefix):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"line {lineno}: expected two integers, got {len(tokens)} tokens",
                line=lineno,
            )
        for tok in tokens:
            try:
                int(tok)
            except ValueError:
                raise EdgeListParseError(
                    f"line {lineno}: non-integer token {tok!r}", line=lineno
                ) from None


def load_labels(source) -> LabelTable:
    """Parse an "id<TAB>label" file; duplicate ids keep the last value."""
    text = _read_text(source)
    labels: dict[int, str] = {}
    duplicates = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        head, sep, tail = line.partition("\t")
        if not sep:
            raise EdgeListParseError(
                f"line {lineno}: missing tab separator", line=lineno
            )
        try:
            node = int(head)
        except ValueError:
            raise EdgeListParseError(
                f"line {lineno}: non-integer id {head!r}", line=lineno
            ) from None
        if node in labels:
            duplicates += 1
        labels[node] = tail
    return LabelTable(labels=labels, duplicate_count=duplicates)


def check_labels(table, n) -> None:
    """Raise if any labelled id lies outside [0, n)."""
    labels = table.labels if isinstance(table, LabelTable) else table
    for node in labels:
        if not 0 <= node < n:
            raise IdRangeError(f"label id {node} outside [0, {n})")


def attach_labels(g: DirectedGraph, table) -> DirectedGraph:
    check_labels(table, g.n)
    labels = table.labels if isinstance(table, LabelTable) else dict(table)
    return DirectedGraph(
        g.n, g.out_ptr, g.out_to, g.in_ptr, g.in_from, labels=labels
    )


def graph_stats(g: DirectedGraph) -> GraphStats:
    return GraphStats(
        node_count=g.n,
        link_count=g.link_count,
        dangling_count=int(np.count_nonzero(g.out_degree == 0)),
        links_per_node=g.link_count / g.n,
    )


def write_edge_list(g: DirectedGraph, dest, index_base=0) -> None:
    """Write the canonical sorted unique edge set as "src dst" lines."""
    src, dst = g.edge_arrays()
    lines = [f"{s + index_base} {d + index_base}\n" for s, d in zip(src, dst)]
    payload = "".join(lines)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        dest.write(payload)


def save_cache(g: DirectedGraph, path) -> None:
    """Binary cache: magic, N, N_l, forward offsets and targets (int64 LE)."""
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        header = np.array([g.n, g.link_count], dtype="<i8")
        fh.write(header.tobytes())
        fh.write(g.out_ptr.astype("<i8", copy=False).tobytes())
        fh.write(g.out_to.astype("<i8", copy=False).tobytes())


def load_cache(path) -> DirectedGraph:
    with open(path, "rb") as fh:
        magic = fh.read(len(CACHE_MAGIC))
        if magic != CACHE_MAGIC:
            raise EdgeListParseError(f"{path}: not a netspectra graph cache")
        header = np.frombuffer(fh.read(16), dtype="<i8")
        n, n_links = int(header[0]), int(header[1])
        out_ptr = np.frombuffer(fh.read(8 * (n + 1)), dtype="<i8").astype(np.int64)
        out_to = np.frombuffer(fh.read(8 * n_links), dtype="<i8").astype(np.int64)
    if out_ptr.shape[0] != n + 1 or out_to.shape[0] != n_links:
        raise EdgeListParseError(f"{path}: truncated graph cache")
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(out_ptr))
    in_ptr, in_from = _build_csr(out_to, src, n)
    return DirectedGraph(n, out_ptr, out_to, in_ptr, in_from)


def remap_dense(g: DirectedGraph) -> tuple[DirectedGraph, np.ndarray]:
    """Compact sparse ids: keep only nodes incident to an edge.

    Returns the remapped graph and the array mapping new id -> old id
    (persist it alongside any exported results).
    """
    src, dst = g.edge_arrays()
    used = np.union1d(src, dst)
    new_of_old = np.full(g.n, -1, dtype=np.int64)
    new_of_old[used] = np.arange(used.size, dtype=np.int64)
    labels = None
    if g.labels:
        labels = {
            int(new_of_old[i]): t
            for i, t in g.labels.items()
            if 0 <= i < g.n and new_of_old[i] >= 0
        }
    remapped = DirectedGraph.from_edge_arrays(
        new_of_old[src], new_of_old[dst], n=used.size, labels=labels
    )
    return remapped, used
