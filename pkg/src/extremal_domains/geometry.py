"""Rotationally symmetric surfaces ``dr^2 + w(r)^2 dtheta^2`` and the radial
domains (disks and bands) living on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ArityError, InvalidDomainError
from .numerics import simpson

POLAR = "polar"
BAND = "band"
FLAT = "flat"


@dataclass(frozen=True)
class WarpedSurface:
    """A warped-product chart with metric ``dr^2 + w(r)^2 dtheta^2``.

    ``antideriv`` is an optional closed-form primitive of ``w``; when absent
    areas fall back to Simpson quadrature.
    """

    name: str
    warp: Callable
    warp_deriv: Callable
    warp_second: Callable
    r_min: float
    r_max: float
    chart_kind: str
    antideriv: Optional[Callable] = field(default=None, compare=False)

    def gauss_curvature(self, r):
        return -np.asarray(self.warp_second(r)) / np.asarray(self.warp(r))

    def w_primitive(self, a: float, b: float) -> float:
        """Integral of ``w`` from ``a`` to ``b``."""
        if self.antideriv is not None:
            return float(self.antideriv(b) - self.antideriv(a))
        return simpson(self.warp, a, b)


def _const(value):
    return lambda r: np.full_like(np.asarray(r, dtype=float), value)


SPHERE_BAND = WarpedSurface(
    name="sphere-band", warp=np.cos, warp_deriv=lambda r: -np.sin(r),
    warp_second=lambda r: -np.cos(r), r_min=-math.pi / 2, r_max=math.pi / 2,
    chart_kind=BAND, antideriv=np.sin,
)
SPHERE_POLAR = WarpedSurface(
    name="sphere-polar", warp=np.sin, warp_deriv=np.cos,
    warp_second=lambda r: -np.sin(r), r_min=0.0, r_max=math.pi,
    chart_kind=POLAR, antideriv=lambda r: -np.cos(r),
)
# flat torus of period 2*pi in both directions
FLAT_TORUS = WarpedSurface(
    name="flat", warp=_const(1.0), warp_deriv=_const(0.0), warp_second=_const(0.0),
    r_min=-math.pi, r_max=math.pi, chart_kind=FLAT, antideriv=lambda r: r,
)

SURFACES = {s.name: s for s in (SPHERE_BAND, SPHERE_POLAR, FLAT_TORUS)}


def get_surface(name: str) -> WarpedSurface:
    try:
        return SURFACES[name]
    except KeyError:
        raise InvalidDomainError(
            f"unknown surface {name!r}; choose from {sorted(SURFACES)}") from None


@dataclass(frozen=True)
class BoundaryCircle:
    r_value: float
    normal_sign: int
    length: float
    kappa_g: float


@dataclass(frozen=True)
class RadialDomain:
    """Disk ``{r <= r0}`` on a polar chart or band ``{r1 <= r <= r2}``."""

    surface: WarpedSurface
    kind: str
    r_lo: float
    r_hi: float

    @property
    def is_disk(self) -> bool:
        return self.kind == "disk"

    @property
    def euler_characteristic(self) -> int:
        return 1 if self.is_disk else 0

    @property
    def boundary_components(self) -> tuple:
        if self.is_disk:
            return (_circle(self.surface, self.r_hi, +1),)
        return (_circle(self.surface, self.r_lo, -1), _circle(self.surface, self.r_hi, +1))

    @property
    def lengths(self) -> np.ndarray:
        return np.array([c.length for c in self.boundary_components])

    @property
    def kappas(self) -> np.ndarray:
        return np.array([c.kappa_g for c in self.boundary_components])

    @property
    def boundary_radii(self) -> np.ndarray:
        return np.array([c.r_value for c in self.boundary_components])

    def describe(self) -> dict:
        out = {"surface": self.surface.name, "kind": self.kind}
        if self.is_disk:
            out["r0"] = self.r_hi
        else:
            out["r1"], out["r2"] = self.r_lo, self.r_hi
        return out

    def label(self) -> str:
        if self.is_disk:
            return f"{self.surface.name}:Disk({self.r_hi:.6g})"
        return f"{self.surface.name}:Band({self.r_lo:.6g}, {self.r_hi:.6g})"


def _circle(surface: WarpedSurface, r: float, sign: int) -> BoundaryCircle:
    w = float(surface.warp(r))
    dw = float(surface.warp_deriv(r))
    return BoundaryCircle(r_value=r, normal_sign=sign, length=2 * math.pi * w,
                          kappa_g=sign * dw / w)


def disk(surface: WarpedSurface, r0: float) -> RadialDomain:
    if surface.chart_kind != POLAR:
        raise InvalidDomainError(f"disks need a polar chart, {surface.name!r} is {surface.chart_kind}")
    if not (surface.r_min < r0 < surface.r_max):
        raise InvalidDomainError(f"disk radius {r0} outside ({surface.r_min}, {surface.r_max})")
    return RadialDomain(surface, "disk", surface.r_min, float(r0))


def band(surface: WarpedSurface, r1: float, r2: float) -> RadialDomain:
    if not (surface.r_min < r1 < r2 < surface.r_max):
        raise InvalidDomainError(
            f"band [{r1}, {r2}] must satisfy {surface.r_min} < r1 < r2 < {surface.r_max}")
    if surface.chart_kind == POLAR and r1 <= surface.r_min:
        raise InvalidDomainError("band touches the pole")
    return RadialDomain(surface, "band", float(r1), float(r2))


def symmetric_band(surface: WarpedSurface, r0: float) -> RadialDomain:
    return band(surface, -r0, r0)


def area(domain: RadialDomain) -> float:
    """``2 pi * integral of w`` over the radial extent."""
    _check(domain)
    return 2 * math.pi * domain.surface.w_primitive(domain.r_lo, domain.r_hi)


def total_curvature(domain: RadialDomain) -> float:
    """Integral of the Gauss curvature over the domain, by Simpson."""
    _check(domain)
    s = domain.surface
    return 2 * math.pi * simpson(lambda r: -np.asarray(s.warp_second(r)) * np.ones_like(r),
                                 domain.r_lo, domain.r_hi, atol=1e-14)


def boundary_geodesic_curvature(domain: RadialDomain) -> float:
    return float(np.sum(domain.lengths * domain.kappas))


def gauss_bonnet_defect(domain: RadialDomain) -> float:
    total = boundary_geodesic_curvature(domain) + total_curvature(domain)
    return abs(total - 2 * math.pi * domain.euler_characteristic)


def boundary_integral_zero_mean(values: Sequence[float], domain: RadialDomain) -> float:
    """Sum of ``value_i * length_i``: the boundary integral of a function that
    is constant on each boundary circle."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.shape != (len(domain.boundary_components),):
        raise ArityError(f"expected {len(domain.boundary_components)} values, got {values.size}")
    return float(values @ domain.lengths)


def _check(domain: RadialDomain):
    s = domain.surface
    if domain.is_disk:
        ok = s.chart_kind == POLAR and s.r_min < domain.r_hi < s.r_max
    else:
        ok = s.r_min < domain.r_lo < domain.r_hi < s.r_max
    if not ok:
        raise InvalidDomainError(f"{domain.label()} lies outside the chart")
