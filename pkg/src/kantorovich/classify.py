"""Convexity classification by condition number, with witness search.

Decision ladder, in order:

1. dim 2: convex iff kappa <= 3 + 2*sqrt(2) (sharp both ways).
2. any dim: kappa > 3 + 2*sqrt(2) rules convexity out; the (e_i + e_j)
   coordinate probe on the extreme eigenvalue pair usually certifies it.
3. dim 3: kappa <= 2 + sqrt(3) is sufficient.
4. any dim: kappa <= sqrt(5 + 2*sqrt(6)) is sufficient.
5. otherwise kappa sits in the open gap: run the sampled falsification
   search; a violating direction gives NotConvex with a witness, exhausting
   the budget gives Undetermined with the scan report.

Threshold comparisons are inclusive within relative 1e-12, so a matrix built
to sit exactly on a boundary classifies with the boundary, not against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .forms import DeltaVector, delta_from_spd, h_form, h_form_batch
from .linalg import PSD_EPS, SpdMatrix, min_eig_batch
from .sampling import (DEFAULT_PLAN, SamplePlan, SampleReport, all_samples,
                       scan_h)

__all__ = [
    "KAPPA_NECESSARY", "KAPPA_SUFFICIENT_ANY", "KAPPA_SUFFICIENT_3D",
    "Status", "Certificate", "Thresholds", "ProbeResult", "Witness",
    "ConvexityVerdict", "necessary_probe", "falsify", "classify",
]

# Convex in dim 2 iff kappa below this; necessary bound in every dim.
KAPPA_NECESSARY = 3.0 + 2.0 * math.sqrt(2.0)
# Sufficient in every dim.
KAPPA_SUFFICIENT_ANY = math.sqrt(5.0 + 2.0 * math.sqrt(6.0))
# Sufficient in dim 3.
KAPPA_SUFFICIENT_3D = 2.0 + math.sqrt(3.0)

# kappa equal to a threshold within this relative slack counts as meeting it.
BOUNDARY_REL_TOL = 1e-12


class Status(str, Enum):
    CONVEX = "Convex"
    NOT_CONVEX = "NotConvex"
    UNDETERMINED = "Undetermined"


class Certificate(str, Enum):
    EXACT_2D = "exact-2d"
    SUFFICIENT_ANY_DIM = "sufficient-any-dim"
    SUFFICIENT_3D = "sufficient-3d"
    NECESSARY_VIOLATED = "necessary-violated"
    WITNESS_FOUND = "witness-found"
    SAMPLING_EXHAUSTED = "sampling-exhausted"


@dataclass(frozen=True)
class Thresholds:
    necessary: float = KAPPA_NECESSARY
    sufficient_any: float = KAPPA_SUFFICIENT_ANY
    sufficient_3d: float = KAPPA_SUFFICIENT_3D

    def as_dict(self) -> dict[str, float]:
        return {
            "necessary": self.necessary,
            "sufficient_any": self.sufficient_any,
            "sufficient_3d": self.sufficient_3d,
        }


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the extreme-pair coordinate probe."""

    worst_pair: tuple[int, int]
    delta_max: float
    quad_value: float
    violated: bool


@dataclass(frozen=True)
class Witness:
    """A direction x with hess f(x) not PSD; lambda_min certifies by how much."""

    point: np.ndarray
    lambda_min: float

    def __post_init__(self):
        p = np.asarray(self.point, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "point", p)


@dataclass(frozen=True)
class ConvexityVerdict:
    status: Status
    certificate: Certificate
    kappa: float
    thresholds: Thresholds
    witness: Witness | None = None
    report: SampleReport | None = None


def necessary_probe(delta: DeltaVector) -> ProbeResult:
    """Evaluate the probe quadratic q(d) = 9 + 3 d - (3/4) d^2 at delta_max.

    q is, up to a positive factor, det h(delta, e_i + e_j) restricted to the
    worst pair; its roots are -2 and 6, so q < 0 exactly when delta_max > 6,
    i.e. kappa > 3 + 2*sqrt(2).
    """
    pair, dmax = delta.max_pair()
    q = 9.0 + 3.0 * dmax - 0.75 * dmax * dmax
    return ProbeResult(worst_pair=pair, delta_max=dmax, quad_value=q,
                       violated=q < 0.0)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo: float, hi: float, iters: int = 22):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _unit_value(delta: DeltaVector, y: np.ndarray) -> float:
    nrm = float(np.linalg.norm(y))
    if nrm == 0.0:
        return math.inf
    return float(min_eig_batch(h_form_batch(delta, (y / nrm)[None, :]))[0])


def _refine(delta: DeltaVector, y0: np.ndarray, rounds: int):
    """Coordinate-wise golden-section descent of lambda_min on the sphere."""
    best_y = y0 / np.linalg.norm(y0)
    best = _unit_value(delta, best_y)
    width = 0.5
    for _ in range(rounds):
        for i in range(delta.dim):
            base = best_y

            def line(t, i=i, base=base):
                z = base.copy()
                z[i] += t
                return _unit_value(delta, z)

            t, ft = _golden_min(line, -width, width)
            if ft < best:
                z = base.copy()
                z[i] += t
                best_y = z / np.linalg.norm(z)
                best = ft
        width *= 0.85
    return best_y, best


def falsify(spd: SpdMatrix, plan: SamplePlan = DEFAULT_PLAN) -> Witness | None:
    """Search for a direction where hess f fails to be PSD.

    Scans the probe + design directions for the most negative lambda_min of
    h(delta, y); a value below the scan tolerance is refined by coordinate
    descent and mapped back to x = U' y.  Returns None when every sampled
    direction passes.
    """
    delta = delta_from_spd(spd)
    pts = all_samples(spd.dim, plan)
    res = scan_h(delta, pts, values_needed=False)
    if not res.violation:
        return None
    y0 = np.array(pts[res.worst_index])
    y, lam = _refine(delta, y0, plan.refine_rounds)
    if lam > res.worst_value:
        y, lam = y0, res.worst_value
    x = spd.spectral.rotation.T @ y
    return Witness(point=x, lambda_min=float(lam))


def _probe_witness(spd: SpdMatrix, delta: DeltaVector) -> Witness | None:
    (i, j), _ = delta.max_pair()
    y = np.zeros(spd.dim)
    y[i] = y[j] = 1.0 / math.sqrt(2.0)
    h = h_form(delta, y)
    lam = float(min_eig_batch(h[None, :, :])[0])
    if lam < -PSD_EPS * max(1.0, float(np.abs(h).max())):
        return Witness(point=spd.spectral.rotation.T @ y, lambda_min=lam)
    return None


def classify(spd: SpdMatrix,
             plan: SamplePlan = DEFAULT_PLAN) -> ConvexityVerdict:
    """Decide convexity of K for ``spd`` (see module docstring for the ladder)."""
    thr = Thresholds()
    inc = 1.0 + BOUNDARY_REL_TOL
    kappa = spd.kappa
    n = spd.dim

    def verdict(status, certificate, witness=None, report=None):
        return ConvexityVerdict(status=status, certificate=certificate,
                                kappa=kappa, thresholds=thr,
                                witness=witness, report=report)

    if n == 1:
        return verdict(Status.CONVEX, Certificate.SUFFICIENT_ANY_DIM)

    delta = delta_from_spd(spd)

    if kappa > thr.necessary * inc:
        certificate = Certificate.NECESSARY_VIOLATED
        return verdict(Status.NOT_CONVEX, certificate,
                       witness=_probe_witness(spd, delta))
    if n == 2:
        return verdict(Status.CONVEX, Certificate.EXACT_2D)
    if n == 3 and kappa <= thr.sufficient_3d * inc:
        return verdict(Status.CONVEX, Certificate.SUFFICIENT_3D)
    if kappa <= thr.sufficient_any * inc:
        return verdict(Status.CONVEX, Certificate.SUFFICIENT_ANY_DIM)

    witness = falsify(spd, plan)
    if witness is not None:
        return verdict(Status.NOT_CONVEX, Certificate.WITNESS_FOUND,
                       witness=witness)

    pts = all_samples(n, plan)
    res = scan_h(delta, pts, values_needed=True)
    report = SampleReport(worst_value=res.worst_value,
                          worst_point=np.array(pts[res.worst_index]),
                          samples=res.samples, seed=plan.seed,
                          tolerance=res.tolerance,
                          passed=not res.violation)
    return verdict(Status.UNDETERMINED, Certificate.SAMPLING_EXHAUSTED,
                   report=report)
