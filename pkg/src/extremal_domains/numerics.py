"""Small numerical kernels: composite Simpson, Richardson extrapolation and
shifted inverse iteration for sparse symmetric matrices."""

from __future__ import annotations

from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConvergenceError

EPS = np.finfo(float).eps


def simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
            rtol: float = 1e-12, atol: float = 1e-15, n0: int = 64,
            max_panels: int = 2 ** 20) -> float:
    """Composite Simpson rule on a uniform grid, doubling until two
    successive values agree to ``rtol`` (relative) or ``atol``."""
    if a == b:
        return 0.0
    n = n0
    prev = _simpson_uniform(f, a, b, n)
    while n < max_panels:
        n *= 2
        cur = _simpson_uniform(f, a, b, n)
        if abs(cur - prev) <= max(rtol * abs(cur), atol):
            return float(cur)
        prev = cur
    raise ConvergenceError("Simpson refinement did not converge",
                           {"panels": n, "last": cur, "change": abs(cur - prev)})


def _simpson_uniform(f, a, b, n):
    x = np.linspace(a, b, n + 1)
    y = np.asarray(f(x), dtype=float)
    if y.shape == ():
        y = np.full_like(x, float(y))
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def richardson(coarse, fine, h_coarse: float, h_fine: float, order: int = 2):
    """Eliminate the leading ``h**order`` error term from two levels.

    Works elementwise on arrays, so symmetric matrices stay symmetric.
    """
    rc = h_coarse ** order
    rf = h_fine ** order
    return (rc * np.asarray(fine) - rf * np.asarray(coarse)) / (rc - rf)


def gershgorin_bound(A) -> float:
    return float(abs(A).sum(axis=1).max())


def inverse_iteration(A, x0=None, *, sigma: float = 0.0, rtol: float = 1e-12,
                      switch_rtol: float = 1e-4, maxit: int = 500):
    """Lowest eigenpair of a sparse symmetric matrix.

    Fixed-shift inverse iteration from ``sigma`` (a lower bound of the
    spectrum) until the Rayleigh quotient settles, then Rayleigh-quotient
    iteration to full accuracy.  Returns ``(value, vector, info)`` with the
    vector normalized to unit Euclidean norm and a positive sum.
    """
    A = sp.csc_matrix(A)
    n = A.shape[0]
    eye = sp.identity(n, format="csc")
    x = np.ones(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    x /= np.linalg.norm(x)
    norm_a = gershgorin_bound(A)
    floor = 64.0 * EPS * norm_a

    lu = splu(A - sigma * eye)
    rho_prev = None
    rqi = False
    shift = sigma
    res = np.inf
    rho = np.nan
    for it in range(1, maxit + 1):
        y = lu.solve(x)
        x = y / np.linalg.norm(y)
        ax = A @ x
        rho = float(x @ ax)
        res = float(np.linalg.norm(ax - rho * x))
        if res <= max(rtol * abs(rho), floor):
            break
        if not rqi and rho_prev is not None and abs(rho - rho_prev) <= switch_rtol * abs(rho):
            rqi = True
        if rqi:
            shift = rho
            try:
                lu = splu(A - shift * eye)
            except RuntimeError:
                # exactly singular: the shift is an eigenvalue to working precision
                break
        rho_prev = rho
    else:
        raise ConvergenceError("inverse iteration hit the iteration limit",
                               {"iterations": maxit, "residual": res,
                                "rayleigh_quotient": rho, "shift": shift})
    if x.sum() < 0:
        x = -x
    return rho, x, {"iterations": it, "residual": res, "shift": shift}
