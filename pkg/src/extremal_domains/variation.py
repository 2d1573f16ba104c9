"""Band deformation families and finite-difference checks of the first and
second variation formulas for the first Dirichlet eigenvalue."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .geometry import RadialDomain, area, band
from .numerics import richardson
from .radial_eig import DEFAULT_N, two_level_lambda1
from .stability import StabilityAnalyzer

GROW_TOP = "grow-top"
SLIDE = "slide"
REL_FLOOR = 1e-12


@dataclass(frozen=True)
class BandFamily:
    """One-parameter family of bands through ``base`` at ``t = 0``.

    ``grow-top`` moves the top circle by ``speed * t``.  ``slide`` moves the
    top circle the same way and places the bottom circle so that the area is
    exactly that of ``base`` (Newton on the primitive of ``w``).
    ``speed = 0`` gives the constant family.
    """

    base: RadialDomain
    mode: str = GROW_TOP
    speed: float = 1.0

    def __post_init__(self):
        if self.base.is_disk:
            raise PreconditionError("band families need a band")
        if self.mode not in (GROW_TOP, SLIDE):
            raise PreconditionError(f"unknown family mode {self.mode!r}")

    def at(self, t: float) -> RadialDomain:
        b = self.base
        r2 = b.r_hi + self.speed * t
        if self.mode == GROW_TOP:
            return band(b.surface, b.r_lo, r2)
        return band(b.surface, self._slide_bottom(r2), r2)

    def _slide_bottom(self, r2: float) -> float:
        b = self.base
        s = b.surface
        target = s.w_primitive(b.r_lo, b.r_hi)
        r1 = b.r_lo + (r2 - b.r_hi) * float(s.warp(b.r_hi) / s.warp(b.r_lo))
        for _ in range(50):
            g = s.w_primitive(r1, r2) - target
            step = -g / float(s.warp(r1))
            r1 -= step
            if abs(step) <= 1e-15 * max(1.0, abs(r1)):
                return r1
        raise ConvergenceError("volume-preserving Newton step did not converge",
                               {"r1": r1, "r2": r2, "residual": g})

    def normal_displacement(self) -> np.ndarray:
        """Outward normal speed at t = 0 on (bottom, top)."""
        b = self.base
        if self.mode == GROW_TOP:
            return np.array([0.0, self.speed])
        ratio = float(b.surface.warp(b.r_hi) / b.surface.warp(b.r_lo))
        return np.array([-ratio * self.speed, self.speed])


@dataclass
class VariationCheck:
    analytic: float
    numeric: float
    rel_error: float
    steps: tuple
    order: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"analytic": self.analytic, "numeric": self.numeric,
                "rel_error": self.rel_error, "steps": list(self.steps),
                "order": self.order, **self.details}


def relative_error(analytic: float, numeric: float, floor: float = REL_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), floor)


def lambda_along(family: BandFamily, ts, n: int = DEFAULT_N) -> np.ndarray:
    return np.array([two_level_lambda1(family.at(t), n).lambda1 for t in ts])


def first_derivative(family: BandFamily, h: float = 1e-3, n: int = DEFAULT_N):
    """Central differences at ``h`` and ``h/2`` combined by Richardson."""
    lam = lambda_along(family, (-h, h, -h / 2, h / 2), n)
    d1 = (lam[1] - lam[0]) / (2 * h)
    d2 = (lam[3] - lam[2]) / h
    return float(richardson(d1, d2, h, h / 2)), (float(d1), float(d2))


def second_derivative(family: BandFamily, h: float = 1e-3, n: int = DEFAULT_N):
    lam = lambda_along(family, (-h, 0.0, h, -h / 2, h / 2), n)
    d1 = (lam[0] - 2 * lam[1] + lam[2]) / h ** 2
    d2 = (lam[3] - 2 * lam[1] + lam[4]) / (h / 2) ** 2
    return float(richardson(d1, d2, h, h / 2)), (float(d1), float(d2))


def hadamard_check(family: BandFamily, h: float = 1e-3, n: int = DEFAULT_N) -> VariationCheck:
    """``d lambda1/dt = -integral v (dphi/dnu)^2`` along a grow-top family."""
    if family.mode != GROW_TOP:
        raise PreconditionError("hadamard_check expects a grow-top family")
    eig = two_level_lambda1(family.base, n)
    v = family.normal_displacement()
    lengths = family.base.lengths
    analytic = -float(np.sum(lengths * v * eig.normal_derivs ** 2))
    if family.speed == 0:
        numeric, raw = 0.0, (0.0, 0.0)
    else:
        numeric, raw = first_derivative(family, h, n)
    return VariationCheck(analytic, numeric, relative_error(analytic, numeric),
                          (h, h / 2), 2, {"raw_differences": list(raw),
                                          "normal_derivs": [float(c) for c in eig.normal_derivs]})


def second_variation_check(family: BandFamily, h: float = 1e-3, n: int = DEFAULT_N,
                           defect_tol: float = 1e-6) -> VariationCheck:
    """``d^2 lambda1/dt^2 = 2 c^2 Q(v, v)`` along the volume-preserving slide,
    with ``Q`` from the mode-0 boundary form."""
    if family.mode != SLIDE:
        raise PreconditionError("second_variation_check expects a slide family")
    an = StabilityAnalyzer(family.base, n)
    eig = an.eigen
    if eig.extremality_defect > defect_tol:
        raise PreconditionError(
            f"base {family.base.label()} is not extremal: defect {eig.extremality_defect:.3e}")
    v = family.normal_displacement()
    form = an.mode_form(0)
    alpha = float(form.basis[0] @ v)
    q = alpha ** 2 * float(form.matrix[0, 0])
    c2 = float(np.mean(eig.normal_derivs ** 2))
    analytic = 2 * c2 * q
    if family.speed == 0:
        numeric, raw = 0.0, (0.0, 0.0)
    else:
        numeric, raw = second_derivative(family, h, n)
    drift = abs(area(family.at(h)) - area(family.base)) / area(family.base)
    return VariationCheck(analytic, numeric, relative_error(analytic, numeric),
                          (h, h / 2), 2, {"raw_differences": list(raw), "Q": q,
                                          "c_squared": c2, "area_drift": drift})


def quadratic_fit_residual(family: BandFamily, t_max: float = 1e-3, samples: int = 9,
                           n: int = DEFAULT_N) -> float:
    """Max residual of a least-squares quadratic through ``lambda1(t)``,
    relative to ``lambda1(0)``."""
    ts = np.linspace(-t_max, t_max, samples)
    lam = lambda_along(family, ts, n)
    coef = np.polyfit(ts, lam, 2)
    return float(np.max(np.abs(np.polyval(coef, ts) - lam)) / abs(lam[samples // 2]))
