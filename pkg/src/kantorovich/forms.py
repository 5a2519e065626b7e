"""Spectral reduction of the Hessian to eigenvalue-ratio data.

For A with eigenvalues l_1 <= ... <= l_n the Hessian of f conjugates to a
matrix that depends on A only through the pairwise ratio sums

    delta_ij = l_j / l_i + l_i / l_j   (>= 2, with delta_1n = kappa + 1/kappa)

and on the rotated point y = U x.  The conjugated form is

    h(delta, y)_ii = 3 y_i^2 + (1/2) sum_{j != i} delta_ij y_j^2
    h(delta, y)_ij = delta_ij y_i y_j                   (i != j)

so convexity of K is exactly "h(delta, y) PSD for every y": a semi-infinite
linear matrix inequality in delta.  The 3-dim analysis additionally normalizes
h by the largest-magnitude coordinate, which yields the three parametric 3x3
forms m/p/q below on the box omega in [2, 4]^3, alpha, beta in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatchError, SpdMatrix

__all__ = [
    "DeltaVector", "delta_from_spd", "pair_indices",
    "h_form", "h_form_batch", "h2_det",
    "m_form", "p_form", "q_form", "det_m_alpha0", "det3_batch",
]

# Delta entries sit in [2, inf) mathematically; allow this much roundoff when
# values arrive from floating-point eigenvalue ratios.
_DELTA_SLACK = 1e-12


def pair_indices(dim: int) -> list[tuple[int, int]]:
    """Canonical (i, j), i < j pair order used to flatten delta vectors."""
    return [(i, j) for i in range(dim - 1) for j in range(i + 1, dim)]


@dataclass(frozen=True)
class DeltaVector:
    """Pairwise eigenvalue-ratio sums of an SPD matrix, flattened over i < j."""

    dim: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        npairs = self.dim * (self.dim - 1) // 2
        if self.dim < 1:
            raise DimensionMismatchError("dim must be >= 1")
        if vals.shape != (npairs,):
            raise DimensionMismatchError(
                f"expected {npairs} pair values for dim {self.dim}, "
                f"got shape {vals.shape}")
        if not np.isfinite(vals).all():
            raise ValueError("delta values must be finite")
        if npairs and vals.min() < 2.0 - _DELTA_SLACK:
            raise ValueError(
                f"delta values must be >= 2, got min {vals.min()!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def as_matrix(self) -> np.ndarray:
        """Symmetric (dim, dim) matrix of the pair values, zero diagonal."""
        m = np.zeros((self.dim, self.dim))
        for k, (i, j) in enumerate(pair_indices(self.dim)):
            m[i, j] = m[j, i] = self.values[k]
        return m

    def max_pair(self) -> tuple[tuple[int, int], float]:
        """The pair with the largest ratio sum (ties: first in pair order)."""
        if self.values.shape[0] == 0:
            raise ValueError("no pairs in a 1-dimensional delta vector")
        k = int(np.argmax(self.values))
        return pair_indices(self.dim)[k], float(self.values[k])


def delta_from_spd(spd: SpdMatrix) -> DeltaVector:
    """Ratio sums l_j/l_i + l_i/l_j over the sorted spectrum of ``spd``."""
    w = spd.eigenvalues
    vals = [w[j] / w[i] + w[i] / w[j] for i, j in pair_indices(spd.dim)]
    return DeltaVector(dim=spd.dim, values=np.asarray(vals, dtype=float))


def h_form_batch(delta: DeltaVector, points: np.ndarray) -> np.ndarray:
    """Conjugated Hessian form h(delta, y) for a stack of points (N, dim)."""
    y = np.asarray(points, dtype=float)
    if y.ndim != 2 or y.shape[1] != delta.dim:
        raise DimensionMismatchError(
            f"points must have shape (N, {delta.dim}), got {y.shape}")
    dm = delta.as_matrix()
    sq = y * y
    h = dm[None, :, :] * (y[:, :, None] * y[:, None, :])
    idx = np.arange(delta.dim)
    h[:, idx, idx] = 3.0 * sq + 0.5 * (sq @ dm)
    return h


def h_form(delta: DeltaVector, y) -> np.ndarray:
    """h(delta, y) for a single point y."""
    v = np.asarray(y, dtype=float)
    if v.shape != (delta.dim,):
        raise DimensionMismatchError(
            f"point shape {v.shape} does not match dim {delta.dim}")
    return h_form_batch(delta, v[None, :])[0]


def h2_det(delta12: float, y) -> float:
    """det h(delta, y) in dim 2, expanded:

    9 y1^2 y2^2 + (3/2) d (y1^4 + y2^4) - (3/4) d^2 y1^2 y2^2

    Concave in d (second derivative -(3/2) y1^2 y2^2), which is what makes
    checking the two endpoint values of a d-interval sufficient.
    """
    y1, y2 = float(y[0]), float(y[1])
    d = float(delta12)
    s1, s2 = y1 * y1, y2 * y2
    return 9.0 * s1 * s2 + 1.5 * d * (s1 * s1 + s2 * s2) - 0.75 * d * d * s1 * s2


def _sym3(e11, e22, e33, e12, e13, e23) -> np.ndarray:
    parts = np.broadcast_arrays(e11, e22, e33, e12, e13, e23)
    e11, e22, e33, e12, e13, e23 = [np.asarray(p, dtype=float) for p in parts]
    out = np.empty(e11.shape + (3, 3))
    out[..., 0, 0] = e11
    out[..., 1, 1] = e22
    out[..., 2, 2] = e33
    out[..., 0, 1] = out[..., 1, 0] = e12
    out[..., 0, 2] = out[..., 2, 0] = e13
    out[..., 1, 2] = out[..., 2, 1] = e23
    return out


def _split_omega(omega):
    w = np.asarray(omega, dtype=float)
    if w.shape and w.shape[-1] == 3:
        return w[..., 0], w[..., 1], w[..., 2]
    raise DimensionMismatchError("omega must have 3 components")


def m_form(omega, alpha, beta) -> np.ndarray:
    """Normalized 3-dim form when the first coordinate dominates.

    With omega = (delta_12, delta_13, delta_23), alpha = y2/y1, beta = y3/y1:
    h(delta, y) = y1^2 * m_form(omega, alpha, beta).  Broadcasts: scalar
    arguments give one (3, 3) matrix, array arguments a stack.
    """
    w1, w2, w3 = _split_omega(omega)
    al = np.asarray(alpha, dtype=float)
    be = np.asarray(beta, dtype=float)
    return _sym3(
        3.0 + 0.5 * w1 * al ** 2 + 0.5 * w2 * be ** 2,
        0.5 * w1 + 3.0 * al ** 2 + 0.5 * w3 * be ** 2,
        0.5 * w2 + 0.5 * w3 * al ** 2 + 3.0 * be ** 2,
        w1 * al,
        w2 * be,
        w3 * al * be,
    )


def p_form(omega, alpha, beta) -> np.ndarray:
    """Companion form when the second coordinate dominates (alpha = y1/y2,
    beta = y3/y2); conjugate to m_form under swapping coordinates 1 and 2
    with omega reordered to (w1, w3, w2)."""
    w1, w2, w3 = _split_omega(omega)
    al = np.asarray(alpha, dtype=float)
    be = np.asarray(beta, dtype=float)
    return _sym3(
        3.0 * al ** 2 + 0.5 * w1 + 0.5 * w2 * be ** 2,
        0.5 * w1 * al ** 2 + 3.0 + 0.5 * w3 * be ** 2,
        0.5 * w2 * al ** 2 + 0.5 * w3 + 3.0 * be ** 2,
        w1 * al,
        w2 * al * be,
        w3 * be,
    )


def q_form(omega, alpha, beta) -> np.ndarray:
    """Companion form when the third coordinate dominates (alpha = y1/y3,
    beta = y2/y3)."""
    w1, w2, w3 = _split_omega(omega)
    al = np.asarray(alpha, dtype=float)
    be = np.asarray(beta, dtype=float)
    return _sym3(
        3.0 * al ** 2 + 0.5 * w1 * be ** 2 + 0.5 * w2,
        0.5 * w1 * al ** 2 + 3.0 * be ** 2 + 0.5 * w3,
        0.5 * w2 * al ** 2 + 0.5 * w3 * be ** 2 + 3.0,
        w1 * al * be,
        w2 * al,
        w3 * be,
    )


def det_m_alpha0(omega, beta) -> np.ndarray | float:
    """det m_form(omega, 0, beta) in closed form:

    (3/2)(w1 + w3 b^2) * ((1/2) w2 + (3 - (1/4) w2^2) b^2 + (1/2) w2 b^4)

    The first factor is positive; the second is a quadratic in b^2 whose
    nonnegativity on w2 in [2, 4] is one of the certified box facts.
    """
    w1, w2, w3 = _split_omega(omega)
    b2 = np.asarray(beta, dtype=float) ** 2
    val = 1.5 * (w1 + w3 * b2) * (
        0.5 * w2 + (3.0 - 0.25 * w2 ** 2) * b2 + 0.5 * w2 * b2 * b2)
    return float(val) if np.ndim(val) == 0 else val


def det3_batch(mats: np.ndarray) -> np.ndarray:
    """Determinants of a (..., 3, 3) stack, cofactor expansion."""
    a = np.asarray(mats, dtype=float)
    return (a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
            - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
            + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0]))
