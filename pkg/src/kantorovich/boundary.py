"""Empirical convexity-threshold probing over parametric eigenvalue families.

For a family kappa -> spectrum(kappa) the prober bisects on kappa between a
convex-looking floor and a witness-bearing ceiling, using the falsification
search as the oracle at each midpoint.  The bracket it returns is an
*empirical* threshold estimate: its floor is only as good as the sample
budget, so brackets are reported per family and never asserted to coincide.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .classify import falsify
from .linalg import SpdMatrix, validate_spd
from .sampling import DEFAULT_PLAN, SamplePlan, all_samples

__all__ = [
    "FAMILY_KINDS", "EigenFamily", "BoundaryStep", "BoundaryEstimate",
    "BadInitialBracketError", "SweepRow", "probe_boundary", "sweep",
    "SWEEP_CSV_HEADER", "sweep_csv",
]

FAMILY_KINDS = ("two_point", "geometric", "pinned_pair", "custom")

SWEEP_CSV_HEADER = "family,dim,kappa_lo,kappa_hi,tol,samples,seed,wall_ms"


class BadInitialBracketError(RuntimeError):
    """The initial kappa bracket does not straddle the empirical threshold."""


@dataclass(frozen=True)
class EigenFamily:
    """A kappa-parametrized spectrum with lambda_max / lambda_min == kappa.

    Kinds: ``two_point`` (1, ..., 1, kappa); ``geometric``
    (kappa^(i/(n-1)), i = 0..n-1); ``pinned_pair`` (1, kappa, ..., kappa);
    ``custom`` (kappa^e_i for given ascending exponents with e_0 = 0,
    e_last = 1).
    """

    kind: str
    dim: int
    exponents: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"kind must be one of {FAMILY_KINDS}")
        if self.dim < 2:
            raise ValueError("family dim must be >= 2")
        if self.kind == "custom":
            e = self.exponents
            if e is None or len(e) != self.dim:
                raise ValueError("custom family needs dim exponents")
            if e[0] != 0.0 or e[-1] != 1.0 or np.any(np.diff(e) < 0):
                raise ValueError(
                    "custom exponents must ascend from 0.0 to 1.0")
            object.__setattr__(self, "exponents", tuple(float(v) for v in e))
        elif self.exponents is not None:
            raise ValueError("exponents only apply to the custom kind")

    def eigenvalues(self, kappa: float) -> np.ndarray:
        if kappa < 1.0:
            raise ValueError("kappa must be >= 1")
        n = self.dim
        if self.kind == "two_point":
            lam = np.ones(n)
            lam[-1] = kappa
        elif self.kind == "pinned_pair":
            lam = np.full(n, kappa)
            lam[0] = 1.0
        elif self.kind == "geometric":
            lam = kappa ** (np.arange(n) / (n - 1))
        else:
            lam = kappa ** np.asarray(self.exponents)
        return lam

    def spd(self, kappa: float) -> SpdMatrix:
        return validate_spd(np.diag(self.eigenvalues(kappa)))

    def label(self) -> str:
        if self.kind == "custom":
            exps = ";".join(repr(e) for e in self.exponents)
            return f"custom[{exps}]"
        return self.kind


@dataclass(frozen=True)
class BoundaryStep:
    kappa: float
    found_witness: bool


@dataclass(frozen=True)
class BoundaryEstimate:
    family: EigenFamily
    kappa_lo: float
    kappa_hi: float
    tol: float
    steps: tuple[BoundaryStep, ...]
    samples: int
    seed: int
    wall_ms: int

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.kappa_lo + self.kappa_hi)


def _witness_found(family: EigenFamily, kappa: float,
                   plan: SamplePlan) -> bool:
    return falsify(family.spd(kappa), plan) is not None


def probe_boundary(family: EigenFamily, tol: float = 1e-4,
                   plan: SamplePlan = DEFAULT_PLAN,
                   bracket: tuple[float, float] = (1.0, 8.0)) -> BoundaryEstimate:
    """Bisect kappa down to ``tol`` between no-witness and witness regimes.

    Requires falsification to find nothing at ``bracket[0]`` and a witness at
    ``bracket[1]``; otherwise raises :class:`BadInitialBracketError`.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 1.0 <= lo < hi:
        raise ValueError("bracket must satisfy 1 <= lo < hi")
    t0 = time.perf_counter()
    steps = []
    lo_found = _witness_found(family, lo, plan)
    steps.append(BoundaryStep(lo, lo_found))
    hi_found = _witness_found(family, hi, plan)
    steps.append(BoundaryStep(hi, hi_found))
    if lo_found:
        raise BadInitialBracketError(
            f"witness already found at kappa_lo = {lo}")
    if not hi_found:
        raise BadInitialBracketError(
            f"no witness found at kappa_hi = {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        found = _witness_found(family, mid, plan)
        steps.append(BoundaryStep(mid, found))
        if found:
            hi = mid
        else:
            lo = mid
    wall_ms = int(round(1000.0 * (time.perf_counter() - t0)))
    return BoundaryEstimate(family=family, kappa_lo=lo, kappa_hi=hi, tol=tol,
                            steps=tuple(steps),
                            samples=all_samples(family.dim, plan).shape[0],
                            seed=plan.seed, wall_ms=wall_ms)


@dataclass(frozen=True)
class SweepRow:
    family: EigenFamily
    estimate: BoundaryEstimate | None
    error: str | None


def sweep(families, tol: float = 1e-4, plan: SamplePlan = DEFAULT_PLAN,
          bracket: tuple[float, float] = (1.0, 8.0)) -> list[SweepRow]:
    """Probe each family in order; a failed bracket fails only its own row."""
    rows = []
    for fam in families:
        try:
            est = probe_boundary(fam, tol=tol, plan=plan, bracket=bracket)
            rows.append(SweepRow(family=fam, estimate=est, error=None))
        except BadInitialBracketError as exc:
            rows.append(SweepRow(family=fam, estimate=None, error=str(exc)))
    return rows


def sweep_csv(rows) -> str:
    """Render sweep rows with the fixed header; failed rows carry nan bounds."""
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        fam = row.family
        if row.estimate is None:
            lines.append(
                f"{fam.label()},{fam.dim},nan,nan,nan,0,0,0")
        else:
            e = row.estimate
            lines.append(
                f"{fam.label()},{fam.dim},{e.kappa_lo!r},{e.kappa_hi!r},"
                f"{e.tol!r},{e.samples},{e.seed},{e.wall_ms}")
    return "\n".join(lines) + "\n"
