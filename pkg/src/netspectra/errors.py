"""Exception types shared across the toolkit.

Input-side errors (bad files, bad ids, bad configuration) map to CLI exit
code 2; compute-side errors (non-convergence, capacity, numerics) map to 1.
"""


class NetspectraError(Exception):
    """Base class for all toolkit errors."""


class EdgeListParseError(NetspectraError):
    """A line of an edge-list or label file could not be parsed."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class IdRangeError(NetspectraError):
    """A node id falls outside [0, N)."""


class ValidationError(NetspectraError):
    """Invalid argument or configuration, detected before any compute."""


class DimensionError(NetspectraError):
    """Vector or permutation length does not match the operator/graph."""


class NumericError(NetspectraError):
    """Non-finite values encountered where finite ones are required."""


class CapacityError(NetspectraError):
    """A guard threshold (dense block size, memory budget) was exceeded."""


class ConvergenceError(NetspectraError):
    """An iteration exhausted its budget.

    Carries the last iterate and its residual so callers studying the
    alpha -> 1 regime can still inspect the partial result.
    """

    def __init__(self, message, last=None, residual=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.iterations = iterations


class EigenSolverError(NetspectraError):
    """The dense nonsymmetric eigensolver failed to converge."""
