# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: CSR column-contribution products and the rank-cut
link-count sweep. Signatures mirror netspectra.kernels._pure exactly."""

import numpy as np


def spmv_contrib(const long long[::1] indptr,
                 const long long[::1] indices,
                 const double[::1] contrib,
                 double[::1] out):
    """Accumulate contrib[j] into out[indices[k]] for every edge k of column j."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t j, k
    cdef double c
    for j in range(n):
        c = contrib[j]
        if c != 0.0:
            for k in range(indptr[j], indptr[j + 1]):
                out[indices[k]] += c


def spmv_contrib_complex(const long long[::1] indptr,
                         const long long[::1] indices,
                         const double complex[::1] contrib,
                         double complex[::1] out):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t j, k
    cdef double complex c
    for j in range(n):
        c = contrib[j]
        if c != 0.0:
            for k in range(indptr[j], indptr[j + 1]):
                out[indices[k]] += c


def cut_count_sweep(const long long[::1] out_ptr,
                    const long long[::1] out_to,
                    const long long[::1] in_ptr,
                    const long long[::1] in_from,
                    const long long[::1] order):
    """Link counts N_AA/N_AB/N_BA after each prefix of `order` joins set A.

    Moves one node at a time from B to A and adjusts the three counters from
    its incident edges; self-loops are handled once, on the out-edge pass.
    Returns three int64 arrays indexed by cut position K-1 (K = 1..N).
    """
    cdef Py_ssize_t n = order.shape[0]
    n_aa = np.empty(n, dtype=np.int64)
    n_ab = np.empty(n, dtype=np.int64)
    n_ba = np.empty(n, dtype=np.int64)
    member = np.zeros(n, dtype=np.uint8)
    cdef long long[::1] aa_v = n_aa
    cdef long long[::1] ab_v = n_ab
    cdef long long[::1] ba_v = n_ba
    cdef unsigned char[::1] in_a = member
    cdef long long aa = 0, ab = 0, ba = 0
    cdef Py_ssize_t pos, k
    cdef long long u, v, w
    for pos in range(n):
        u = order[pos]
        for k in range(out_ptr[u], out_ptr[u + 1]):
            v = out_to[k]
            if v == u:
                aa += 1            # self-loop goes BB -> AA
            elif in_a[v]:
                ba -= 1
                aa += 1
            else:
                ab += 1
        for k in range(in_ptr[u], in_ptr[u + 1]):
            w = in_from[k]
            if w == u:
                continue           # self-loop already counted
            if in_a[w]:
                ab -= 1
                aa += 1
            else:
                ba += 1
        in_a[u] = 1
        aa_v[pos] = aa
        ab_v[pos] = ab
        ba_v[pos] = ba
    return n_aa, n_ab, n_ba
