"""Numerical verification of the certified inequalities and robust PSD claims.

Three layers:

* sampled verification of the semi-infinite constraint h(delta, y) PSD
  (:func:`verify_h_lmi`);
* exhaustive grid checks of the five scalar box inequalities on
  [2, 4]^3 that drive the 3-dim sufficiency proof
  (:func:`box_inequality_grid_check`);
* robust PSD grids for the normalized forms m/p/q on
  omega in [2, 4]^3 x (alpha, beta) in [-1, 1]^2, plus the convexity-in-alpha
  facts about det m (:func:`robust_psd_grid`,
  :func:`detm_alpha_convexity_check`).

Grid scans use one absolute tolerance (values >= -1e-9 pass); every check
reports its worst cell so a failure is immediately reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .forms import (DeltaVector, det3_batch, det_m_alpha0, m_form, p_form,
                    q_form)
from .linalg import PSD_EPS, min_eig_batch
from .sampling import DEFAULT_PLAN, SamplePlan, SampleReport, all_samples, scan_h

__all__ = [
    "GRID_TOL", "Axis", "GridSpec", "GridScanReport", "GridCheckSummary",
    "verify_h_lmi", "box_inequalities", "BoxValues",
    "box_inequality_grid_check", "robust_psd_grid",
    "detm_alpha_poly", "detm_alpha_convexity_check",
    "BOX_GRID_DEFAULT", "OMEGA_GRID_DEFAULT", "AB_GRID_DEFAULT",
    "BETA_GRID_DEFAULT",
]

# Absolute pass tolerance for grid-evaluated inequality values.
GRID_TOL = 1e-9


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("axis bounds must be finite")
        if self.count < 1:
            raise ValueError("axis count must be >= 1")
        if self.lo > self.hi:
            raise ValueError("axis range must be ordered lo <= hi")
        if self.count == 1 and self.lo != self.hi:
            raise ValueError("single-node axis requires lo == hi")

    def nodes(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[Axis, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes:
            raise ValueError("grid needs at least one axis")

    @classmethod
    def cube(cls, lo: float, hi: float, count: int, ndim: int) -> "GridSpec":
        return cls(tuple(Axis(lo, hi, count) for _ in range(ndim)))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def cells(self) -> int:
        out = 1
        for ax in self.axes:
            out *= ax.count
        return out

    def node_arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(ax.nodes() for ax in self.axes)


@dataclass(frozen=True)
class GridScanReport:
    """Worst cell of one scanned inequality."""

    grid_id: str
    passed: bool
    tolerance: float
    worst_value: float
    worst_cell: tuple[float, ...]
    cells: int


@dataclass(frozen=True)
class GridCheckSummary:
    """A bundle of grid scans that pass or fail together."""

    passed: bool
    reports: tuple[GridScanReport, ...]

    @property
    def worst(self) -> GridScanReport:
        return min(self.reports, key=lambda r: r.worst_value)


BOX_GRID_DEFAULT = GridSpec.cube(2.0, 4.0, 41, 3)
OMEGA_GRID_DEFAULT = GridSpec.cube(2.0, 4.0, 21, 3)
AB_GRID_DEFAULT = GridSpec.cube(-1.0, 1.0, 41, 2)
BETA_GRID_DEFAULT = GridSpec.cube(-1.0, 1.0, 41, 1)


def verify_h_lmi(delta: DeltaVector, plan: SamplePlan = DEFAULT_PLAN,
                 eps: float = PSD_EPS) -> SampleReport:
    """Sampled check that h(delta, y) is PSD over unit directions.

    The report's worst point re-evaluates to its worst value exactly (same
    arithmetic path), and ``passed`` means the worst value clears
    ``-eps * max(1, sup|h|)``.
    """
    pts = all_samples(delta.dim, plan)
    res = scan_h(delta, pts, eps=eps, values_needed=True)
    return SampleReport(worst_value=res.worst_value,
                        worst_point=np.array(pts[res.worst_index]),
                        samples=res.samples, seed=plan.seed,
                        tolerance=res.tolerance, passed=not res.violation)


class BoxValues(NamedTuple):
    chi1: np.ndarray
    chi2: np.ndarray
    chi3: np.ndarray
    chi4: np.ndarray
    psi: np.ndarray


def box_inequalities(d1, d2, d3) -> BoxValues:
    """The five scalar functions certified nonnegative on [2, 4]^3.

    chi1 = 6 d3 + d1 d2 - (1/2) d3 d2^2
    chi2 = 6 d1 + d3 d2 - (1/2) d1 d2^2
    chi3 = 6 d2 + d1 d3 - (1/2) d2 d1^2
    chi4 = 6 d3 + d1 d2 - (1/2) d3 d1^2
    psi  = 12 + d1 d2 d3 - d1^2 - d2^2 - d3^2

    Each is concave in every variable separately, so box minima sit at
    corners; psi bottoms out at 4 on permutations of (2, 2, 4).
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    d3 = np.asarray(d3, dtype=float)
    return BoxValues(
        chi1=6.0 * d3 + d1 * d2 - 0.5 * d3 * d2 ** 2,
        chi2=6.0 * d1 + d3 * d2 - 0.5 * d1 * d2 ** 2,
        chi3=6.0 * d2 + d1 * d3 - 0.5 * d2 * d1 ** 2,
        chi4=6.0 * d3 + d1 * d2 - 0.5 * d3 * d1 ** 2,
        psi=12.0 + d1 * d2 * d3 - d1 ** 2 - d2 ** 2 - d3 ** 2,
    )


def _worst_of(values: np.ndarray, coords: tuple[np.ndarray, ...],
              grid_id: str, tol: float, cells: int) -> GridScanReport:
    flat = values.reshape(-1)
    k = int(np.argmin(flat))
    idx = np.unravel_index(k, values.shape)
    cell = tuple(float(c[i]) for c, i in zip(coords, idx))
    worst = float(flat[k])
    return GridScanReport(grid_id=grid_id, passed=worst >= -tol,
                          tolerance=tol, worst_value=worst,
                          worst_cell=cell, cells=cells)


def box_inequality_grid_check(grid: GridSpec = BOX_GRID_DEFAULT,
                              tol: float = GRID_TOL) -> GridCheckSummary:
    """Evaluate the five box inequalities at every grid node."""
    if grid.ndim != 3:
        raise ValueError("box grid must have 3 axes")
    n1, n2, n3 = grid.node_arrays()
    g1, g2, g3 = np.meshgrid(n1, n2, n3, indexing="ij")
    vals = box_inequalities(g1, g2, g3)
    reports = tuple(
        _worst_of(v, (n1, n2, n3), f"box_{name}", tol, grid.cells)
        for name, v in zip(BoxValues._fields, vals))
    return GridCheckSummary(passed=all(r.passed for r in reports),
                            reports=reports)


_FORMS: dict[str, Callable] = {"M": m_form, "P": p_form, "Q": q_form}


def robust_psd_grid(form: str, omega_grid: GridSpec = OMEGA_GRID_DEFAULT,
                    ab_grid: GridSpec = AB_GRID_DEFAULT,
                    tol: float = GRID_TOL) -> GridScanReport:
    """Minimum eigenvalue of one normalized form over the full grid.

    Scans omega x (alpha, beta) in chunks over the first omega axis; the
    worst cell is reported as (w1, w2, w3, alpha, beta).
    """
    try:
        builder = _FORMS[form.upper()]
    except KeyError:
        raise ValueError(f"form must be one of M, P, Q, got {form!r}") from None
    if omega_grid.ndim != 3 or ab_grid.ndim != 2:
        raise ValueError("omega grid needs 3 axes and ab grid needs 2")
    n1, n2, n3 = omega_grid.node_arrays()
    na, nb = ab_grid.node_arrays()
    worst = math.inf
    worst_cell: tuple[float, ...] = ()
    for i1, w1 in enumerate(n1):
        g2, g3, ga, gb = np.meshgrid(n2, n3, na, nb, indexing="ij")
        omega = np.stack([np.full_like(g2, w1), g2, g3], axis=-1)
        lam = min_eig_batch(builder(omega, ga, gb))
        k = int(np.argmin(lam))
        if float(lam.reshape(-1)[k]) < worst:
            worst = float(lam.reshape(-1)[k])
            i2, i3, ia, ib = np.unravel_index(k, lam.shape)
            worst_cell = (float(w1), float(n2[i2]), float(n3[i3]),
                          float(na[ia]), float(nb[ib]))
    cells = omega_grid.cells * ab_grid.cells
    return GridScanReport(grid_id=f"robust_{form.upper()}",
                          passed=worst >= -tol, tolerance=tol,
                          worst_value=worst, worst_cell=worst_cell,
                          cells=cells)


# Interpolation nodes recovering the degree-6 alpha-polynomial det m exactly.
_ALPHA_NODES = np.array([-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0,
                         1.0 / 3.0, 2.0 / 3.0, 1.0])
_VANDER = np.vander(_ALPHA_NODES, 7, increasing=True)


def detm_alpha_poly(omega, beta: float) -> np.ndarray:
    """Coefficients (ascending) of alpha -> det m_form(omega, alpha, beta).

    det m is a polynomial of degree <= 6 in alpha, so interpolation through
    the seven fixed nodes recovers it exactly.  Structural facts checked in
    the suite: odd coefficients vanish (det m is even in alpha) and
    c6 = (3/4) w1 w3.
    """
    w = np.asarray(omega, dtype=float)
    vals = det3_batch(m_form(w, _ALPHA_NODES, float(beta)))
    return np.linalg.solve(_VANDER, vals)


def _polyder_coefs(coefs: np.ndarray, order: int) -> np.ndarray:
    out = coefs
    for _ in range(order):
        deg = out.shape[0] - 1
        out = out[1:] * np.arange(1, deg + 1)[:, None]
    return out


def detm_alpha_convexity_check(omega_grid: GridSpec = OMEGA_GRID_DEFAULT,
                               beta_grid: GridSpec = BETA_GRID_DEFAULT,
                               alpha_count: int = 41,
                               tol: float = GRID_TOL) -> GridCheckSummary:
    """Certify the alpha-behavior of det m over an (omega, beta) grid.

    At every (omega, beta) cell the interpolated polynomial must have
    nonnegative second and fourth derivatives on the alpha grid, its values
    must stay above the alpha = 0 value, and det m(alpha=0) itself must be
    nonnegative (closed form).  Worst cells are (w1, w2, w3, beta[, alpha]).
    """
    if omega_grid.ndim != 3 or beta_grid.ndim != 1:
        raise ValueError("omega grid needs 3 axes and beta grid 1")
    n1, n2, n3 = omega_grid.node_arrays()
    nb = beta_grid.node_arrays()[0]
    alpha_nodes = np.linspace(-1.0, 1.0, alpha_count)
    basis = np.vander(alpha_nodes, 7, increasing=True)

    trackers: dict[str, list] = {
        name: [math.inf, ()]
        for name in ("detm_d2", "detm_d4", "detm_min_at_zero", "detm_alpha0")
    }

    def track(name, values, axes):
        flat = values.reshape(-1)
        k = int(np.argmin(flat))
        if float(flat[k]) < trackers[name][0]:
            idx = np.unravel_index(k, values.shape)
            trackers[name][0] = float(flat[k])
            trackers[name][1] = tuple(float(ax[i]) for ax, i in zip(axes, idx))

    for w1 in n1:
        g2, g3, gb = np.meshgrid(n2, n3, nb, indexing="ij")
        shape = g2.shape
        omega = np.stack([np.full_like(g2, w1), g2, g3],
                         axis=-1).reshape(-1, 3)
        betas = gb.reshape(-1)
        vals = np.empty((7, omega.shape[0]))
        for k, a in enumerate(_ALPHA_NODES):
            vals[k] = det3_batch(m_form(omega, a, betas))
        coefs = np.linalg.solve(_VANDER, vals)

        def spread(mat):
            # (alpha_count, cells) -> (1, len2, len3, lenb, alpha_count)
            return np.moveaxis(mat.reshape((-1,) + shape), 0, -1)[None, ...]

        axes5 = (np.array([w1]), n2, n3, nb, alpha_nodes)
        track("detm_d2", spread(basis[:, :5] @ _polyder_coefs(coefs, 2)), axes5)
        track("detm_d4", spread(basis[:, :3] @ _polyder_coefs(coefs, 4)), axes5)
        track("detm_min_at_zero", spread(basis @ coefs - coefs[0]), axes5)
        a0 = np.asarray(det_m_alpha0(omega, betas)).reshape((1,) + shape)
        track("detm_alpha0", a0, (np.array([w1]), n2, n3, nb))

    cells = omega_grid.cells * beta_grid.cells
    reports = tuple(
        GridScanReport(grid_id=name, passed=worst >= -tol, tolerance=tol,
                       worst_value=worst, worst_cell=cell, cells=cells)
        for name, (worst, cell) in trackers.items())
    return GridCheckSummary(passed=all(r.passed for r in reports),
                            reports=reports)
