"""Kernel backend selection: compiled extension when built, numpy fallback.

The active backend is chosen at import time and can be overridden with
:func:`use_backend` (used by the benchmark and the cross-backend tests).
"""

from . import _pure

try:
    from . import _speedups
except ImportError:
    _speedups = None

_active = _speedups if _speedups is not None else _pure


def active_backend() -> str:
    """Name of the backend currently in use: 'cython' or 'python'."""
    return "cython" if _active is _speedups else "python"


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _speedups is not None else ("python",)


def use_backend(name: str) -> None:
    """Select 'cython', 'python', or 'auto' (compiled when available)."""
    global _active
    if name == "auto":
        _active = _speedups if _speedups is not None else _pure
    elif name == "python":
        _active = _pure
    elif name == "cython":
        if _speedups is None:
            raise ValueError("compiled kernels are not available in this install")
        _active = _speedups
    else:
        raise ValueError(f"unknown kernel backend {name!r}")


def spmv_contrib(indptr, indices, contrib, out):
    return _active.spmv_contrib(indptr, indices, contrib, out)


def spmv_contrib_complex(indptr, indices, contrib, out):
    return _active.spmv_contrib_complex(indptr, indices, contrib, out)


def cut_count_sweep(out_ptr, out_to, in_ptr, in_from, order):
    return _active.cut_count_sweep(out_ptr, out_to, in_ptr, in_from, order)
