"""Hemi-metrics on the positive orthant and on nonnegative matrices.

The directed (Funk) distance between x and y in the open orthant is
``log max_i x_i / y_i``.  It satisfies the triangle inequality but is
neither symmetric nor nonnegative.  Its symmetrizations are the
Thompson metric ``max(funk(x, y), funk(y, x))`` and the Hilbert
projective metric ``funk(x, y) + funk(y, x)``; the latter vanishes on
rays.  All ratios are accumulated as differences of logarithms so that
extreme magnitudes cannot overflow.

Comparisons with zero entries are structural: an entry is inside the
support iff it is exactly positive.  When x has mass where y has none
the directed distance would be infinite; that situation is reported as
a :class:`~cosra.errors.DifferentParts` error instead of an ``inf`` so
that it cannot propagate silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DifferentParts, InvalidParam

__all__ = [
    "funk_vec",
    "thompson_vec",
    "hilbert_vec",
    "funk_mat",
    "thompson_mat",
    "hausdorff_thompson",
    "SupportPattern",
    "MatrixSet",
    "as_pos_vector",
]


def as_pos_vector(x, *, name: str = "x") -> np.ndarray:
    """Validate and return a nonnegative, nonzero, finite 1-d array."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InvalidParam(f"{name} must be a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidParam(f"{name} has non-finite entries")
    if np.any(v < 0):
        raise InvalidParam(f"{name} has negative entries")
    if not np.any(v > 0):
        raise InvalidParam(f"{name} is the zero vector")
    return v


def _log_pos(v: np.ndarray) -> np.ndarray:
    """Elementwise log with -inf at zeros, warning-free."""
    out = np.full(v.shape, -np.inf)
    pos = v > 0
    out[pos] = np.log(v[pos])
    return out


def funk_vec(x, y) -> float:
    """Directed Funk distance log max_i x_i/y_i over the support of x.

    Raises DifferentParts when some x_i > 0 meets y_i = 0, which would
    make the distance infinite.
    """
    x = as_pos_vector(x, name="x")
    y = as_pos_vector(y, name="y")
    if x.shape != y.shape:
        raise InvalidParam("x and y must have the same dimension")
    xs = x > 0
    if np.any(xs & (y == 0)):
        raise DifferentParts("x has mass where y vanishes")
    return float(np.max(np.log(x[xs]) - np.log(y[xs])))


def thompson_vec(x, y) -> float:
    """Thompson metric: max of the two directed Funk distances."""
    return max(funk_vec(x, y), funk_vec(y, x))


def hilbert_vec(x, y) -> float:
    """Hilbert projective metric: sum of the two directed Funk distances."""
    return funk_vec(x, y) + funk_vec(y, x)


def _check_same_support(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    sa = A > 0
    sb = B > 0
    if sa.shape != sb.shape or not np.array_equal(sa, sb):
        raise DifferentParts("matrices have different support patterns")
    return sa


def funk_mat(A, B) -> float:
    """Directed Funk distance between matrices sharing a support pattern.

    Equals log max over supported entries of A_ij / B_ij.  It dominates
    funk_vec(xA, xB) for every interior row vector x.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    s = _check_same_support(A, B)
    if not s.any():
        raise InvalidParam("matrices have empty support")
    return float(np.max(np.log(A[s]) - np.log(B[s])))


def thompson_mat(A, B) -> float:
    """Thompson metric on matrices: max of the directed distances."""
    return max(funk_mat(A, B), funk_mat(B, A))


@dataclass(frozen=True)
class SupportPattern:
    """Boolean d x d mask of the positive entries of a family of matrices."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
            raise InvalidParam("support mask must be a square matrix")
        if not mask.any(axis=1).all():
            raise InvalidParam("support mask has an empty row (the zero vector would be reachable)")
        object.__setattr__(self, "mask", mask)

    @property
    def dim(self) -> int:
        return self.mask.shape[0]

    def matches(self, A: np.ndarray) -> bool:
        return bool(np.array_equal(np.asarray(A) > 0, self.mask))


@dataclass(frozen=True)
class MatrixSet:
    """A finite set of nonnegative matrices sharing one support pattern."""

    matrices: np.ndarray  # (n, d, d)
    support: SupportPattern

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise InvalidParam("matrices must have shape (n, d, d)")
        if mats.shape[0] == 0:
            raise InvalidParam("matrix set is empty")
        if not np.all(np.isfinite(mats)):
            raise InvalidParam("matrix set has non-finite entries")
        if np.any(mats < 0):
            raise InvalidParam("matrix set has negative entries")
        for M in mats:
            if not self.support.matches(M):
                raise DifferentParts("matrix does not match the common support pattern")
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_matrices(cls, matrices) -> "MatrixSet":
        mats = np.asarray(matrices, dtype=float)
        if mats.ndim != 3:
            raise InvalidParam("expected a list of square matrices")
        return cls(matrices=mats, support=SupportPattern(mats[0] > 0))

    def __len__(self) -> int:
        return self.matrices.shape[0]


def _directed_hausdorff(S: np.ndarray, T: np.ndarray) -> float:
    return max(min(thompson_mat(A, B) for B in T) for A in S)


def hausdorff_thompson(S1, S2) -> float:
    """Hausdorff distance between two matrix sets under the Thompson metric.

    All matrices of both sets must share one support pattern.
    """
    m1 = S1.matrices if isinstance(S1, MatrixSet) else np.asarray(S1, dtype=float)
    m2 = S2.matrices if isinstance(S2, MatrixSet) else np.asarray(S2, dtype=float)
    ref = m1[0] > 0
    for M in list(m1) + list(m2):
        if not np.array_equal(M > 0, ref):
            raise DifferentParts("sets do not share a single support pattern")
    return max(_directed_hausdorff(m1, m2), _directed_hausdorff(m2, m1))
