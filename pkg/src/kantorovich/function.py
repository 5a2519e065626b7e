"""The Kantorovich function K(x) = (x'Ax)(x'A^-1x): values and derivatives.

All calculus is done on the quarter-scaled f(x) = K(x)/4 = q(x) * q_inv(x)
with q(x) = x'Ax/2, which keeps the gradient and Hessian free of stray
factors.  Convexity of K and of f coincide.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .linalg import (DimensionMismatchError, NonFiniteError, SpdMatrix,
                     ZeroVectorError)

__all__ = [
    "k_value", "f_value", "f_gradient", "f_hessian", "fd_hessian",
    "BoundCheck", "kantorovich_bound_check",
]


def _as_point(spd: SpdMatrix, x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (spd.dim,):
        raise DimensionMismatchError(
            f"point shape {v.shape} does not match dim {spd.dim}")
    if not np.isfinite(v).all():
        raise NonFiniteError("point has non-finite entries")
    return v


def _quadratics(spd: SpdMatrix, x: np.ndarray):
    ax = spd.matrix @ x
    ix = spd.inverse @ x
    return 0.5 * float(x @ ax), 0.5 * float(x @ ix), ax, ix


def f_value(spd: SpdMatrix, x) -> float:
    """f(x) = (x'Ax)(x'A^-1x) / 4."""
    v = _as_point(spd, x)
    qa, qi, _, _ = _quadratics(spd, v)
    return qa * qi


def k_value(spd: SpdMatrix, x) -> float:
    """K(x) = (x'Ax)(x'A^-1x).  Homogeneous of degree 4, K(x) >= ||x||^4."""
    return 4.0 * f_value(spd, x)


def f_gradient(spd: SpdMatrix, x) -> np.ndarray:
    """grad f(x) = q_inv(x) * Ax + q(x) * A^-1 x."""
    v = _as_point(spd, x)
    qa, qi, ax, ix = _quadratics(spd, v)
    return qi * ax + qa * ix


def f_hessian(spd: SpdMatrix, x) -> np.ndarray:
    """Exact Hessian of f at x.

    hess f(x) = q(x) A^-1 + q_inv(x) A + (Ax)(A^-1x)' + (A^-1x)(Ax)'

    Assembled in one pass; symmetric by construction.
    """
    v = _as_point(spd, x)
    qa, qi, ax, ix = _quadratics(spd, v)
    cross = np.outer(ax, ix)
    return qa * spd.inverse + qi * spd.matrix + cross + cross.T


def fd_hessian(spd: SpdMatrix, x, step: float = 1e-5) -> np.ndarray:
    """Central-difference Hessian from the analytic gradient.

    Column i uses step h_i = step * (1 + |x_i|); the result is symmetrized.
    Diagnostic companion to :func:`f_hessian`, not a replacement.
    """
    v = _as_point(spd, x)
    n = spd.dim
    out = np.empty((n, n))
    for i in range(n):
        h = step * (1.0 + abs(v[i]))
        up = v.copy()
        dn = v.copy()
        up[i] += h
        dn[i] -= h
        out[:, i] = (f_gradient(spd, up) - f_gradient(spd, dn)) / (2.0 * h)
    return 0.5 * (out + out.T)


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def kantorovich_bound_check(spd: SpdMatrix, x,
                            variant: str = "classical") -> BoundCheck:
    """Check the Kantorovich upper bound on K(x) for nonzero x.

    ``classical``:  K(x) <= (l1 + ln)^2 / (4 l1 ln) * ||x||^4, tight when x
    mixes the extreme eigenvectors equally.

    ``as_printed``: the variant K(x) <= (l1^2 + ln^2) / (4 l1 ln) * ||x||^4.
    This one fails already at A = diag(1, 6), x = (1, 1); it is exposed so the
    CLI can report both forms side by side.
    """
    v = _as_point(spd, x)
    nx2 = float(v @ v)
    if nx2 == 0.0:
        raise ZeroVectorError("bound check requires a nonzero point")
    l1 = float(spd.eigenvalues[0])
    ln = float(spd.eigenvalues[-1])
    lhs = k_value(spd, v)
    if variant == "classical":
        factor = (l1 + ln) ** 2 / (4.0 * l1 * ln)
    elif variant == "as_printed":
        factor = (l1 * l1 + ln * ln) / (4.0 * l1 * ln)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    rhs = factor * nx2 * nx2
    return BoundCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs * (1.0 + 1e-12))
