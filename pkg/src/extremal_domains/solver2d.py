"""First Dirichlet eigenpair of angularly perturbed bands.

The band ``rho1(theta) <= r <= rho2(theta)`` is mapped to the rectangle
``[0, 2 pi) x [0, 1]`` by ``r = rho1 + s (rho2 - rho1)``.  In ``(theta, s)``
the Dirichlet energy density of ``dr^2 + w^2 dtheta^2`` reads

    A u_s^2 + 2 B u_s u_theta + C u_theta^2,   area element D w,

with ``D = rho2 - rho1``, ``R = rho1' + s D'``, ``A = (R^2 + w^2)/(D w)``,
``B = -R/w`` and ``C = D/w``.  The discrete energy puts ``A`` on s-edges,
``C`` on theta-edges and the cross term on cell centres.  Without a
perturbation it coincides with the radial scheme for mode 0, so both
solvers share their discrete eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDomainError, PreconditionError
from .geometry import WarpedSurface
from .numerics import inverse_iteration, richardson
from .variation import VariationCheck, relative_error

DEFAULT_N_THETA = 128
DEFAULT_N_S = 256
MIN_WIDTH = 1e-6


@dataclass(frozen=True)
class FourierCurve:
    """``mean + sum_k cos_k cos(k theta) + sin_k sin(k theta)``, k from 1."""

    mean: float
    cos: tuple = ()
    sin: tuple = ()

    @property
    def degree(self) -> int:
        return max(len(self.cos), len(self.sin))

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, self.mean)
        for k, a in enumerate(self.cos, start=1):
            out = out + a * np.cos(k * theta)
        for k, b in enumerate(self.sin, start=1):
            out = out + b * np.sin(k * theta)
        return out

    def derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, a in enumerate(self.cos, start=1):
            out = out - k * a * np.sin(k * theta)
        for k, b in enumerate(self.sin, start=1):
            out = out + k * b * np.cos(k * theta)
        return out

    def plus_mode(self, k: int, amplitude: float) -> "FourierCurve":
        """Add ``amplitude * cos(k theta)``."""
        if k == 0:
            return replace(self, mean=self.mean + amplitude)
        cos = list(self.cos) + [0.0] * max(0, k - len(self.cos))
        cos[k - 1] += amplitude
        return replace(self, cos=tuple(cos))

    def rotated(self, shift: float) -> "FourierCurve":
        """The curve ``theta -> self(theta - shift)``."""
        cos, sin = [], []
        for k in range(1, self.degree + 1):
            a = self.cos[k - 1] if k <= len(self.cos) else 0.0
            b = self.sin[k - 1] if k <= len(self.sin) else 0.0
            c, s = math.cos(k * shift), math.sin(k * shift)
            cos.append(a * c - b * s)
            sin.append(a * s + b * c)
        return FourierCurve(self.mean, tuple(cos), tuple(sin))


@dataclass(frozen=True)
class PerturbedBand:
    surface: WarpedSurface
    rho1: FourierCurve
    rho2: FourierCurve
    n_theta: int = DEFAULT_N_THETA
    n_s: int = DEFAULT_N_S

    def __post_init__(self):
        if self.n_theta < 8 or self.n_s < 8:
            raise InvalidDomainError("grid needs at least 8 points in each direction")
        if max(self.rho1.degree, self.rho2.degree) > self.n_theta // 4:
            raise InvalidDomainError(
                f"Fourier degree exceeds n_theta/4 = {self.n_theta // 4}")
        th = np.linspace(0, 2 * math.pi, 4 * self.n_theta, endpoint=False)
        lo, hi = self.rho1(th), self.rho2(th)
        gap = float(np.min(hi - lo))
        # the map degenerates when the thinnest part is squeezed far below the widest
        if gap <= MIN_WIDTH or gap <= 4.0 * float(np.max(hi - lo)) / self.n_s:
            raise InvalidDomainError(f"band too thin for the grid: min width {gap:.3e}")
        if np.min(lo) <= self.surface.r_min or np.max(hi) >= self.surface.r_max:
            raise InvalidDomainError("boundary curves leave the chart")

    @classmethod
    def unperturbed(cls, surface: WarpedSurface, r1: float, r2: float, **grid) -> "PerturbedBand":
        return cls(surface, FourierCurve(r1), FourierCurve(r2), **grid)

    def with_grid(self, n_theta: int, n_s: int) -> "PerturbedBand":
        return replace(self, n_theta=n_theta, n_s=n_s)

    @property
    def theta(self) -> np.ndarray:
        return 2 * math.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_s + 1)

    def label(self) -> str:
        return (f"{self.surface.name}:PerturbedBand({self.rho1}, {self.rho2}, "
                f"{self.n_theta}x{self.n_s})")


def _coefficients(dom: PerturbedBand, theta, s):
    """``A, B, C`` and the area density ``D w`` at the points ``(theta, s)``."""
    r1, r2 = dom.rho1(theta), dom.rho2(theta)
    d1, d2 = dom.rho1.derivative(theta), dom.rho2.derivative(theta)
    D = r2 - r1
    R = d1 + s * (d2 - d1)
    w = np.asarray(dom.surface.warp(r1 + s * D), dtype=float)
    return (R ** 2 + w ** 2) / (D * w), -R / w, D / w, D * w


class Assembly:
    def __init__(self, dom: PerturbedBand):
        nt, ns = dom.n_theta, dom.n_s
        ht, hs = 2 * math.pi / nt, 1.0 / ns
        th, s = dom.theta, dom.s
        self.dom, self.ht, self.hs = dom, ht, hs

        Is = sp.identity(ns + 1, format="csr")
        It = sp.identity(nt, format="csr")
        ds = sp.diags([-np.ones(ns), np.ones(ns)], [0, 1], shape=(ns, ns + 1)) / hs
        avg_s = sp.diags([np.full(ns, 0.5), np.full(ns, 0.5)], [0, 1], shape=(ns, ns + 1))
        dt = (sp.diags([-np.ones(nt), np.ones(nt - 1)], [0, 1], shape=(nt, nt)).tolil())
        dt[nt - 1, 0] = 1.0
        dt = dt.tocsr() / ht
        avg_t = sp.diags([np.full(nt, 0.5), np.full(nt - 1, 0.5)], [0, 1], shape=(nt, nt)).tolil()
        avg_t[nt - 1, 0] = 0.5
        avg_t = avg_t.tocsr()

        cell = ht * hs
        smid = 0.5 * (s[1:] + s[:-1])
        tmid = th + 0.5 * ht
        half = np.ones(ns + 1)
        half[[0, -1]] = 0.5

        # s-edges at (theta_i, s_{j+1/2})
        TT, SS = np.meshgrid(th, smid, indexing="ij")
        A, _, _, _ = _coefficients(dom, TT, SS)
        Gs = sp.kron(It, ds, format="csr")
        K = Gs.T @ sp.diags(cell * A.ravel()) @ Gs
        # theta-edges at (theta_{i+1/2}, s_j)
        TT, SS = np.meshgrid(tmid, s, indexing="ij")
        _, _, C, _ = _coefficients(dom, TT, SS)
        Gt = sp.kron(dt, Is, format="csr")
        K = K + Gt.T @ sp.diags(cell * (C * half).ravel()) @ Gt
        # cross term at cell centres (theta_{i+1/2}, s_{j+1/2})
        TT, SS = np.meshgrid(tmid, smid, indexing="ij")
        _, B, _, _ = _coefficients(dom, TT, SS)
        Us = sp.kron(avg_t, ds, format="csr")
        Ut = sp.kron(dt, avg_s, format="csr")
        X = Us.T @ sp.diags(cell * B.ravel()) @ Ut
        self.stiffness = (K + X + X.T).tocsr()

        TT, SS = np.meshgrid(th, s, indexing="ij")
        _, _, _, dens = _coefficients(dom, TT, SS)
        self.mass = (cell * dens * half).ravel()

        idx = np.arange(nt * (ns + 1)).reshape(nt, ns + 1)
        self.interior = idx[:, 1:-1].ravel()
        self.bottom = idx[:, 0]
        self.top = idx[:, -1]


@dataclass(frozen=True, eq=False)
class Eigen2D:
    """``phi`` has shape ``(n_theta, n_s + 1)``; ``normal_derivs`` has rows
    (bottom, top), each sampled at the grid angles, outward."""

    domain: PerturbedBand
    lambda1: float
    phi: np.ndarray
    normal_derivs: np.ndarray
    extremality_defect: float
    residual: float
    l2_norm: float
    extrapolated: bool = False
    grids: tuple = ()

    def summary(self) -> dict:
        return {"lambda1": self.lambda1, "extremality_defect": self.extremality_defect,
                "residual": self.residual, "l2_norm": self.l2_norm,
                "grids": [list(g) for g in self.grids]}


def _line_element(dom: PerturbedBand, curve: FourierCurve) -> np.ndarray:
    th = dom.theta
    w = np.asarray(dom.surface.warp(curve(th)), dtype=float)
    return np.sqrt(curve.derivative(th) ** 2 + w ** 2)


def _defect(c) -> float:
    a = np.abs(c)
    return float(a.max() - a.min())


def discrete_eigen2d(dom: PerturbedBand) -> Eigen2D:
    asm = Assembly(dom)
    I = asm.interior
    m = asm.mass[I]
    d = 1.0 / np.sqrt(m)
    T = sp.diags(d) @ asm.stiffness[I][:, I] @ sp.diags(d)
    lam, y, _ = inverse_iteration(T, np.sqrt(m))
    u = np.zeros(asm.mass.size)
    u[I] = d * y
    u /= math.sqrt(float(asm.mass @ u ** 2))
    Ku = asm.stiffness @ u
    resid = (Ku - lam * asm.mass * u)[I] / m
    # boundary rows of the energy give the flux times the boundary cell length
    cb = Ku[asm.bottom] / (asm.ht * _line_element(dom, dom.rho1))
    ct = Ku[asm.top] / (asm.ht * _line_element(dom, dom.rho2))
    nd = np.vstack([cb, ct])
    return Eigen2D(dom, float(lam), u.reshape(dom.n_theta, dom.n_s + 1), nd,
                   _defect(nd), float(np.max(np.abs(resid))),
                   math.sqrt(float(asm.mass @ u ** 2)), False,
                   ((dom.n_theta, dom.n_s),))


def lambda1_2d(dom: PerturbedBand, refine: bool = True) -> Eigen2D:
    """First eigenpair; with ``refine`` the grid is doubled in both directions
    and ``lambda1`` and the boundary traces (at the coarse angles) are
    Richardson-extrapolated."""
    coarse = discrete_eigen2d(dom)
    if not refine:
        return coarse
    fine = discrete_eigen2d(dom.with_grid(2 * dom.n_theta, 2 * dom.n_s))
    lam = float(richardson(coarse.lambda1, fine.lambda1, 2.0, 1.0))
    nd = np.asarray(richardson(coarse.normal_derivs, fine.normal_derivs[:, ::2], 2.0, 1.0))
    return Eigen2D(dom, lam, coarse.phi, nd, _defect(nd), fine.residual, coarse.l2_norm,
                   True, coarse.grids + fine.grids)


def first_variation_2d(eig: Eigen2D, k: int, circle: int = 1) -> float:
    """``-integral v (dphi/dnu)^2 dl`` for the boundary motion
    ``rho -> rho + t cos(k theta)`` of one circle (0 bottom, 1 top).

    The outward normal speed times the line element is
    ``+-cos(k theta) w(rho) dtheta``; the periodic trapezoid rule is exact
    for the band-limited part.
    """
    dom = eig.domain
    curve = dom.rho2 if circle == 1 else dom.rho1
    sign = 1.0 if circle == 1 else -1.0
    th = dom.theta
    w = np.asarray(dom.surface.warp(curve(th)), dtype=float)
    integrand = sign * np.cos(k * th) * w * eig.normal_derivs[circle] ** 2
    return -float(np.sum(integrand) * 2 * math.pi / dom.n_theta)


def hadamard_check_2d(base: PerturbedBand, k: int, h: float = 1e-3,
                      refine: bool = True, circle: int = 1) -> VariationCheck:
    """Compare ``first_variation_2d`` with central differences of
    ``lambda1_2d`` along ``rho + t cos(k theta)`` on the chosen circle.

    On an unperturbed (extremal) band the mode ``k >= 1`` derivative
    vanishes; the check is meaningful on a base that already carries a
    perturbation in a mode that couples to ``k``.
    """
    if h <= 0:
        raise PreconditionError("step must be positive")

    def moved(t):
        if circle == 1:
            return replace(base, rho2=base.rho2.plus_mode(k, t))
        return replace(base, rho1=base.rho1.plus_mode(k, t))

    eig = lambda1_2d(base, refine)
    analytic = first_variation_2d(eig, k, circle)
    lam = [lambda1_2d(moved(t), refine).lambda1 for t in (-h, h, -h / 2, h / 2)]
    d1 = (lam[1] - lam[0]) / (2 * h)
    d2 = (lam[3] - lam[2]) / h
    numeric = float(richardson(d1, d2, h, h / 2))
    return VariationCheck(analytic, numeric, relative_error(analytic, numeric), (h, h / 2), 2,
                          {"raw_differences": [d1, d2], "lambda1": eig.lambda1,
                           "extremality_defect": eig.extremality_defect,
                           "grids": [list(g) for g in eig.grids]})
