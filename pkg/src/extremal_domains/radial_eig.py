"""First Dirichlet eigenpair of rotationally invariant domains.

The mode-k radial operator ``-(w psi')'/w + k^2/w^2 psi`` is discretized in
energy (finite-volume) form on a uniform grid:

* bands use a vertex grid whose end nodes carry the Dirichlet data;
* disks use a staggered grid starting at ``h/2``, so the pole is a cell face
  where the flux weight ``w(0) = 0`` vanishes and no ghost node is needed.

The scheme is second order and its boundary flux is the one obtained from
the discrete energy by summation by parts, which keeps Green's identity and
the Fredholm alternative exact at the discrete level.  Scalars (eigenvalue,
normal derivatives) are Richardson-extrapolated across mesh doublings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidDomainError
from .geometry import SPHERE_BAND, SPHERE_POLAR, RadialDomain, area, disk
from .numerics import inverse_iteration, richardson

DEFAULT_N = 2048
MIN_NODES = 32


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Uniform radial grid.  ``nodes`` include the boundary nodes; for a disk
    the first node sits at ``h/2`` and the pole is a cell face."""

    nodes: np.ndarray
    spacing: float
    pole: bool

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def boundary_index(self) -> tuple:
        return (self.n - 1,) if self.pole else (0, self.n - 1)

    @property
    def interior(self) -> slice:
        return slice(0, self.n - 1) if self.pole else slice(1, self.n - 1)

    @property
    def cell_widths(self) -> np.ndarray:
        cw = np.full(self.n, self.spacing)
        cw[-1] *= 0.5
        if not self.pole:
            cw[0] *= 0.5
        return cw

    @property
    def faces(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    @classmethod
    def for_domain(cls, domain: RadialDomain, n: int = DEFAULT_N) -> "Mesh1D":
        if n < MIN_NODES:
            raise ValueError(f"mesh needs at least {MIN_NODES} nodes, got {n}")
        if domain.is_disk:
            h = domain.r_hi / (n - 0.5)
            nodes = (np.arange(n) + 0.5) * h
            nodes[-1] = domain.r_hi
            return cls(nodes, h, True)
        nodes = np.linspace(domain.r_lo, domain.r_hi, n)
        return cls(nodes, (domain.r_hi - domain.r_lo) / (n - 1), False)

    def refined(self, domain: RadialDomain) -> "Mesh1D":
        """Next level with (about) half the spacing; band grids nest exactly."""
        return Mesh1D.for_domain(domain, 2 * self.n if self.pole else 2 * self.n - 1)


class ModeOperator(NamedTuple):
    """Full-grid pieces of the discrete energy for Fourier mode ``k``."""

    stiffness: sp.csr_matrix   # flux part, boundary rows included
    potential: np.ndarray      # cell_width * k^2 / w
    mass: np.ndarray           # cell_width * w
    warp: np.ndarray           # w at the nodes


def mode_operator(domain: RadialDomain, mesh: Mesh1D, k: int = 0) -> ModeOperator:
    s = domain.surface
    w = np.asarray(s.warp(mesh.nodes), dtype=float)
    wf = np.asarray(s.warp(mesh.faces), dtype=float) / mesh.spacing
    diag = np.zeros(mesh.n)
    diag[:-1] += wf
    diag[1:] += wf
    K = sp.diags([-wf, diag, -wf], [-1, 0, 1], format="csr")
    cw = mesh.cell_widths
    return ModeOperator(K, cw * k * k / w, cw * w, w)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """First Dirichlet eigenpair.

    ``phi`` is sampled on ``mesh.nodes`` (zero at boundary nodes) and
    normalized by ``2 pi * sum(mass * phi**2) = 1``.  ``normal_derivs`` are
    outward derivatives, one per boundary circle.  When ``extrapolated`` is
    set, ``lambda1`` and ``normal_derivs`` are Richardson values over
    ``levels`` while ``phi`` comes from the finest mesh; otherwise everything
    is the raw discrete solution on ``mesh``.
    """

    domain: RadialDomain
    mesh: Mesh1D
    lambda1: float
    phi: np.ndarray
    normal_derivs: np.ndarray
    l2_norm: float
    residual: float
    extremality_defect: float
    iterations: int
    extrapolated: bool = False
    levels: tuple = ()

    def summary(self) -> dict:
        return {
            "domain": self.domain.describe(),
            "lambda1": self.lambda1,
            "normal_derivs": [float(c) for c in self.normal_derivs],
            "extremality_defect": self.extremality_defect,
            "l2_norm": self.l2_norm,
            "residual": self.residual,
            "area": area(self.domain),
            "mesh_levels": list(self.levels) or [self.mesh.n],
        }


def boundary_flux(op: ModeOperator, mesh: Mesh1D, psi: np.ndarray, lam: float) -> np.ndarray:
    """``w * dpsi/dnu`` (outward) at each boundary node, from the discrete
    energy: the boundary rows of ``(K + P - lam M) psi``."""
    idx = list(mesh.boundary_index)
    rows = op.stiffness[idx] @ psi
    return rows + (op.potential[idx] - lam * op.mass[idx]) * psi[idx]


def discrete_eigenpair(domain: RadialDomain, mesh: Mesh1D) -> EigenSolution:
    """Raw second-order eigenpair on one mesh (no extrapolation)."""
    op = mode_operator(domain, mesh, 0)
    I = mesh.interior
    m = op.mass[I]
    d = 1.0 / np.sqrt(m)
    A = op.stiffness[I][:, I]
    T = sp.diags(d) @ A @ sp.diags(d)
    lam, y, info = inverse_iteration(T, np.sqrt(m))
    phi = np.zeros(mesh.n)
    phi[I] = d * y
    phi /= math.sqrt(2 * math.pi * float(op.mass @ phi ** 2))
    resid = (op.stiffness @ phi + (op.potential - lam * op.mass) * phi)[I] / m
    flux = boundary_flux(op, mesh, phi, lam)
    c = flux / op.warp[list(mesh.boundary_index)]
    return EigenSolution(
        domain=domain, mesh=mesh, lambda1=float(lam), phi=phi, normal_derivs=c,
        l2_norm=math.sqrt(2 * math.pi * float(op.mass @ phi ** 2)),
        residual=float(np.max(np.abs(resid))),
        extremality_defect=_defect(c), iterations=info["iterations"],
    )


def _defect(c) -> float:
    a = np.abs(np.asarray(c))
    return float(a.max() - a.min())


def _combine(coarse: EigenSolution, fine: EigenSolution) -> EigenSolution:
    hc, hf = coarse.mesh.spacing, fine.mesh.spacing
    lam = float(richardson(coarse.lambda1, fine.lambda1, hc, hf))
    c = richardson(coarse.normal_derivs, fine.normal_derivs, hc, hf)
    return EigenSolution(
        domain=fine.domain, mesh=fine.mesh, lambda1=lam, phi=fine.phi,
        normal_derivs=c, l2_norm=fine.l2_norm, residual=fine.residual,
        extremality_defect=_defect(c), iterations=fine.iterations,
        extrapolated=True, levels=(coarse.mesh.n, fine.mesh.n),
    )


def two_level_lambda1(domain: RadialDomain, n: int = DEFAULT_N) -> EigenSolution:
    """Richardson value over exactly two meshes (``n`` and its refinement).

    Unlike the adaptive loop of ``solve_lambda1`` the mesh count does not
    depend on the domain, so the result varies smoothly along a family of
    domains; finite differences in the family parameter rely on this.
    """
    mesh = Mesh1D.for_domain(domain, n)
    return _combine(discrete_eigenpair(domain, mesh),
                    discrete_eigenpair(domain, mesh.refined(domain)))


def solve_lambda1(domain: RadialDomain, mesh: Optional[Mesh1D] = None, *,
                  n: int = DEFAULT_N, refine: bool = True, rtol: float = 1e-9,
                  max_nodes: int = 2 ** 19) -> EigenSolution:
    """First Dirichlet eigenvalue of a disk or band (Fourier mode 0).

    With ``refine=False`` this is the raw discrete eigenpair on ``mesh``.
    Otherwise the mesh is doubled and successive Richardson values are
    compared until they agree to ``rtol``.
    """
    mesh = mesh or Mesh1D.for_domain(domain, n)
    coarse = discrete_eigenpair(domain, mesh)
    if not refine:
        return coarse
    fine = discrete_eigenpair(domain, mesh.refined(domain))
    best = _combine(coarse, fine)
    while True:
        nxt_mesh = fine.mesh.refined(domain)
        if nxt_mesh.n > max_nodes:
            return best
        nxt = discrete_eigenpair(domain, nxt_mesh)
        cand = _combine(fine, nxt)
        levels = best.levels + (nxt_mesh.n,)
        done = abs(cand.lambda1 - best.lambda1) <= rtol * abs(cand.lambda1)
        best = replace(cand, levels=levels)
        if done:
            return best
        fine = nxt


def liouville_potential(r):
    """``f''/f`` for ``f = sqrt(cos r)``."""
    return -0.5 - 0.25 * np.tan(r) ** 2


def _liouville_level(r1: float, r2: float, n: int):
    x = np.linspace(r1, r2, n)
    h = x[1] - x[0]
    q = liouville_potential(x[1:-1])
    d = 2.0 / h ** 2 + q
    e = np.full(n - 3, -1.0 / h ** 2)
    val = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))
    return float(val[0]), h


def liouville_lambda1(domain: RadialDomain, n: int = DEFAULT_N) -> float:
    """Independent eigenvalue route for bands on the sphere: with ``u = f phi``
    the radial equation becomes ``-u'' + (f''/f) u = lam u``, solved by a
    plain tridiagonal eigensolve and Richardson over two levels."""
    if domain.surface is not SPHERE_BAND or domain.is_disk:
        raise InvalidDomainError("liouville_lambda1 needs a band on the sphere-band chart")
    lc, hc = _liouville_level(domain.r_lo, domain.r_hi, n)
    lf, hf = _liouville_level(domain.r_lo, domain.r_hi, 2 * n - 1)
    return float(richardson(lc, lf, hc, hf))


def lambda1_lower_bound(r0: float) -> float:
    """``(pi/(2 r0))^2 - 1/2 - tan(r0)^2 / 4`` for the symmetric sphere band."""
    if not (0.0 < r0 < math.pi / 2):
        raise InvalidDomainError(f"r0 must lie in (0, pi/2), got {r0}")
    return (math.pi / (2 * r0)) ** 2 + float(liouville_potential(r0))


class FKPoint(NamedTuple):
    area: float
    lambda1: float
    product: float


def fk_profile_point(r0: float, n: int = DEFAULT_N) -> FKPoint:
    """Area, first eigenvalue and their product for the geodesic disk of
    radius ``r0`` on the unit sphere."""
    d = disk(SPHERE_POLAR, r0)
    lam = solve_lambda1(d, n=n).lambda1
    a = area(d)
    return FKPoint(a, lam, a * lam)
