"""Closed-form reference values, independent of the finite-volume solvers.

Every function here is built from special functions or elementary
separation of variables; none of them touches a mesh.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import hyp2f1, jn_zeros

J0_FIRST_ZERO = float(jn_zeros(0, 1)[0])
UNIT_DISK_LAMBDA1 = J0_FIRST_ZERO ** 2


def flat_band_lambda1(a: float) -> float:
    """First Dirichlet eigenvalue of ``[-a, a] x S^1`` with ``w = 1``."""
    return (math.pi / (2 * a)) ** 2


def flat_band_normal_derivative(a: float) -> float:
    """``|dphi/dnu|`` for ``phi = A cos(pi r / 2a)`` with unit L2 norm on the
    flat band of circumference ``2 pi``."""
    amp = 1.0 / math.sqrt(2 * math.pi * a)
    return amp * math.pi / (2 * a)


def flat_mode_dtn(a: float, k: int, lam: float) -> tuple:
    """Eigenvalues of the mode-``k`` Dirichlet-to-Neumann map on the flat
    band ``[-a, a]`` for ``psi'' = (k^2 - lam) psi``: even and odd profiles."""
    d = k * k - lam
    if d > 0:
        mu = math.sqrt(d)
        return mu * math.tanh(mu * a), mu / math.tanh(mu * a)
    if d < 0:
        mu = math.sqrt(-d)
        return -mu * math.tan(mu * a), mu / math.tan(mu * a)
    return 0.0, 1.0 / a


def legendre_degree(lam: float) -> float:
    return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * lam))


def legendre_p(nu: float, r):
    """``P_nu(cos r)`` through its hypergeometric representation."""
    return hyp2f1(-nu, nu + 1.0, 1.0, np.sin(np.asarray(r) / 2) ** 2)


def legendre_p_dr(nu: float, r):
    """``d/dr P_nu(cos r)``."""
    r = np.asarray(r)
    a, b = -nu, nu + 1.0
    return a * b * hyp2f1(a + 1, b + 1, 2.0, np.sin(r / 2) ** 2) * np.sin(r) / 2


def spherical_cap_lambda1(r0: float) -> float:
    """First Dirichlet eigenvalue of the geodesic disk of radius ``r0`` on the
    unit sphere: ``nu(nu+1)`` with ``P_nu(cos r0) = 0`` at the smallest root."""
    lo, hi = 1e-9, J0_FIRST_ZERO / r0 + 2.0
    # P_nu(cos r0) is positive for small nu and first changes sign at the root
    grid = np.linspace(lo, hi, 400)
    vals = legendre_p(grid, r0)
    i = int(np.argmax(vals <= 0))
    nu = brentq(lambda x: float(legendre_p(x, r0)), grid[i - 1], grid[i], xtol=1e-15, rtol=1e-15)
    return nu * (nu + 1.0)


def rotation_jacobi_profile(r0: float, r, lam: float = None):
    """Mode-1 radial profile of ``<V, grad phi>`` for a rotation ``V`` about
    an equatorial axis, scaled to equal 1 on the boundary circle ``r = r0``.

    On the polar chart ``<V, d_r>`` is ``cos(theta)`` up to sign, so the
    profile is ``phi'(r) / phi'(r0)`` with ``phi = P_nu(cos r)``.
    """
    lam = spherical_cap_lambda1(r0) if lam is None else lam
    nu = legendre_degree(lam)
    return legendre_p_dr(nu, r) / legendre_p_dr(nu, r0)


def hemisphere_eigenfunction(r):
    """Unit-L2 first eigenfunction of the hemisphere ``{r <= pi/2}``."""
    return math.sqrt(3.0 / (2.0 * math.pi)) * np.cos(r)


def band_area(r0: float) -> float:
    return 4 * math.pi * math.sin(r0)


def sin_ratio_energy(r0: float) -> float:
    """Dirichlet energy of ``sin r / sin r0`` on the sphere band ``|r| <= r0``."""
    return 4 * math.pi / math.sin(r0) - 4 * math.pi / 3 * math.sin(r0)
