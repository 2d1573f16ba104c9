"""Second variation of the first eigenvalue on rotationally symmetric
extremal domains.

On a disk or band the boundary quadratic form

    Q(v, v) = integral over the boundary of  v * d(v_hat)/dnu + kappa_g * v^2

splits over Fourier modes ``cos(k theta)``, ``sin(k theta)``.  Within a mode
the boundary data is one number per circle, so ``Q`` becomes a tiny
symmetric matrix built from radial Helmholtz extensions.  Mode 0 needs
zero-mean data and an extension made unique by orthogonality to the
eigenfunction (the kernel of the singular mode-0 problem).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded
from scipy.sparse.linalg import spsolve

from .errors import (
    FredholmViolationError,
    PreconditionError,
    ResonanceError,
    TruncationInconclusiveError,
)
from .geometry import FLAT, RadialDomain
from .numerics import richardson
from .radial_eig import (
    DEFAULT_N,
    EigenSolution,
    Mesh1D,
    _combine,
    discrete_eigenpair,
    mode_operator,
)

DEFAULT_KMAX = 64
DEFAULT_NULL_TOL = 1e-6
POSITIVE_STREAK = 3


def angular_weight(k: int) -> float:
    """Integral of ``cos(k theta)**2`` over the circle."""
    return 2 * math.pi if k == 0 else math.pi


def multiplicity(k: int) -> int:
    return 1 if k == 0 else 2


@dataclass(frozen=True, eq=False)
class ModeExtension:
    """Radial profile ``psi`` of ``v_hat = psi(r) cos(k theta)`` on one mesh."""

    k: int
    boundary_data: np.ndarray
    psi: np.ndarray
    flux: np.ndarray            # w * dpsi/dnu at each circle
    normal_derivs: np.ndarray   # dpsi/dnu (outward)
    deflated: bool
    residual: float
    multiplier: float           # Lagrange multiplier of the orthogonality constraint
    mesh: Mesh1D


def _raw(eig: EigenSolution) -> EigenSolution:
    return discrete_eigenpair(eig.domain, eig.mesh) if eig.extrapolated else eig


def solve_extension(eig: EigenSolution, k: int, boundary_data: Sequence[float]) -> ModeExtension:
    """Solve ``psi'' + (w'/w) psi' + (lambda1 - k^2/w^2) psi = 0`` with the
    given value on each boundary circle.

    ``eig`` must be (or is reduced to) the raw discrete eigenpair of its mesh
    so that the mode-0 problem is singular exactly along ``phi``.
    """
    eig = _raw(eig)
    domain, mesh = eig.domain, eig.mesh
    data = np.atleast_1d(np.asarray(boundary_data, dtype=float))
    nb = len(domain.boundary_components)
    if data.shape != (nb,):
        raise PreconditionError(f"expected {nb} boundary values, got {data.size}")
    op = mode_operator(domain, mesh, k)
    lam = eig.lambda1
    I = mesh.interior
    B = list(mesh.boundary_index)
    psi = np.zeros(mesh.n)
    psi[B] = data
    A = (op.stiffness + sp.diags(op.potential - lam * op.mass)).tocsr()
    A_II = A[I][:, I]
    rhs = -(A[I][:, B] @ data)

    mult = 0.0
    deflated = k == 0 and not domain.is_disk
    if k == 0:
        mean = float(data @ domain.lengths)
        scale = float(np.abs(data) @ domain.lengths)
        if abs(mean) > 1e-10 * max(scale, 1e-300):
            raise FredholmViolationError(
                f"mode-0 data must have zero boundary mean, got {mean:.3e}")
    if deflated:
        mphi = (op.mass * eig.phi)[I]
        bordered = sp.bmat([[A_II, sp.csr_matrix(mphi[:, None])],
                            [sp.csr_matrix(mphi[None, :]), None]], format="csc")
        sol = spsolve(bordered, np.append(rhs, 0.0))
        psi[I] = sol[:-1]
        mult = float(sol[-1])
    elif k == 0:
        # disk: zero-mean data is identically zero
        psi[I] = 0.0
    else:
        psi[I] = _solve_positive_tridiagonal(A_II, rhs, k, domain)

    full = A @ psi
    resid = full[I] / op.mass[I]
    flux = full[B]
    return ModeExtension(
        k=k, boundary_data=data, psi=psi, flux=flux, normal_derivs=flux / op.warp[B],
        deflated=deflated, residual=float(np.max(np.abs(resid))), multiplier=mult, mesh=mesh,
    )


def _solve_positive_tridiagonal(A, rhs, k, domain):
    A = sp.dia_matrix(A)
    main = A.diagonal(0)
    upper = A.diagonal(1)
    ab = np.zeros((2, main.size))
    ab[0, 1:] = upper
    ab[1] = main
    try:
        cb = cholesky_banded(ab)
    except LinAlgError:
        raise ResonanceError(
            f"mode {k} operator shifted by lambda1 is not positive definite on "
            f"{domain.label()}") from None
    return cho_solve_banded((cb, False), rhs)


def mode_basis(domain: RadialDomain, k: int) -> np.ndarray:
    """Rows are the admissible boundary data vectors for mode ``k``."""
    nb = len(domain.boundary_components)
    if k >= 1:
        return np.eye(nb)
    if domain.is_disk:
        return np.zeros((0, 1))
    L = domain.lengths
    u = np.array([L[1], -L[0]])
    return (u / np.linalg.norm(u))[None, :]


def _form_from_extensions(domain, k, basis, exts) -> np.ndarray:
    w_b = domain.lengths / (2 * math.pi)
    kap = domain.kappas
    m = basis.shape[0]
    M = np.zeros((m, m))
    for j, ext in enumerate(exts):
        h = ext.flux + kap * w_b * basis[j]
        M[:, j] = basis @ h
    return angular_weight(k) * M


@dataclass(frozen=True, eq=False)
class ModeForm:
    """``Q`` restricted to boundary data ``(sum_j a_j e_j) cos(k theta)``."""

    k: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray    # columns, in the coordinates of ``basis``
    symmetry_defect: float
    basis: np.ndarray

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def boundary_vector(self, i: int) -> np.ndarray:
        """Eigenvector ``i`` expressed as per-circle boundary values."""
        return self.basis.T @ self.eigenvectors[:, i]


def _finish_form(k, M, basis) -> ModeForm:
    if M.size == 0:
        return ModeForm(k, M, np.zeros(0), np.zeros((0, 0)), 0.0, basis)
    defect = float(np.max(np.abs(M - M.T)))
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    for i in range(vecs.shape[1]):
        j = int(np.argmax(np.abs(vecs[:, i])))
        if vecs[j, i] < 0:
            vecs[:, i] = -vecs[:, i]
    return ModeForm(k, M, vals, vecs, defect, basis)


def discrete_mode_form(eig: EigenSolution, k: int) -> ModeForm:
    """Mode form on a single mesh (no extrapolation)."""
    eig = _raw(eig)
    basis = mode_basis(eig.domain, k)
    exts = [solve_extension(eig, k, e) for e in basis]
    return _finish_form(k, _form_from_extensions(eig.domain, k, basis, exts), basis)


class StabilityAnalyzer:
    """Holds the discrete eigenpairs on two nested meshes of one domain and
    produces Richardson-extrapolated mode forms."""

    def __init__(self, domain: RadialDomain, n: int = DEFAULT_N):
        self.domain = domain
        mesh = Mesh1D.for_domain(domain, n)
        self.levels = (discrete_eigenpair(domain, mesh),
                       discrete_eigenpair(domain, mesh.refined(domain)))
        self.eigen = _combine(*self.levels)
        self._cache = {}

    @property
    def lambda1(self) -> float:
        return self.eigen.lambda1

    def mode_form(self, k: int) -> ModeForm:
        if k not in self._cache:
            coarse, fine = (discrete_mode_form(e, k) for e in self.levels)
            M = richardson(coarse.matrix, fine.matrix,
                           self.levels[0].mesh.spacing, self.levels[1].mesh.spacing)
            self._cache[k] = _finish_form(k, np.asarray(M, dtype=float), coarse.basis)
        return self._cache[k]

    def extension(self, k: int, data, level: int = -1) -> ModeExtension:
        return solve_extension(self.levels[level], k, data)


def mode_form(domain: RadialDomain, k: int, n: int = DEFAULT_N) -> ModeForm:
    return StabilityAnalyzer(domain, n).mode_form(k)


def expected_nullity(domain: RadialDomain) -> int:
    """Jacobi directions produced by ambient isometries that move the domain:
    rotations about two equatorial axes on the sphere, translation across the
    band on the flat torus."""
    return 1 if domain.surface.chart_kind == FLAT else 2


def stopping_threshold(domain: RadialDomain, lambda1: float, nodes: np.ndarray) -> int:
    wmax = float(np.max(domain.surface.warp(nodes)))
    kmax_curv = float(np.max(np.abs(domain.kappas)))
    return int(math.ceil(math.sqrt(lambda1) * wmax + kmax_curv * wmax))


@dataclass
class StabilityReport:
    domain: dict
    lambda1: float
    modes: list
    morse_index: int
    nullity: int
    k_stop: int
    k_threshold: int
    stop_reason: str
    verdict: str
    null_tol: float
    null_tol_abs: float
    expected_nullity: int
    warnings: list = field(default_factory=list)

    def table_rows(self) -> list:
        """``(k, m, eig_1, ..., eig_m)`` per scanned mode."""
        return [[f.k, f.m, *map(float, f.eigenvalues)] for f in self.modes]

    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "lambda1": self.lambda1,
            "morse_index": self.morse_index,
            "nullity": self.nullity,
            "expected_nullity": self.expected_nullity,
            "verdict": self.verdict,
            "k_stop": self.k_stop,
            "k_threshold": self.k_threshold,
            "stop_reason": self.stop_reason,
            "null_tol": self.null_tol,
            "null_tol_abs": self.null_tol_abs,
            "multiplicity_rule": "1 for k = 0, 2 for k >= 1 (cos and sin)",
            "modes": [{"k": f.k, "m": f.m, "eigenvalues": [float(x) for x in f.eigenvalues],
                       "symmetry_defect": f.symmetry_defect} for f in self.modes],
            "warnings": list(self.warnings),
        }


def _count(modes, tol_abs):
    index = nullity = 0
    for f in modes:
        mult = multiplicity(f.k)
        index += mult * int(np.sum(f.eigenvalues < -tol_abs))
        nullity += mult * int(np.sum(np.abs(f.eigenvalues) <= tol_abs))
    return index, nullity


def morse_index(domain: RadialDomain, *, kmax: int = DEFAULT_KMAX,
                null_tol: float = DEFAULT_NULL_TOL, n: int = DEFAULT_N,
                analyzer: Optional[StabilityAnalyzer] = None) -> StabilityReport:
    """Scan Fourier modes and count negative and null directions of ``Q``.

    The scan stops after ``POSITIVE_STREAK`` consecutive modes with a
    positive smallest eigenvalue beyond the analytic threshold
    ``ceil(sqrt(lambda1) max w + max|kappa_g| max w)``.
    """
    an = analyzer or StabilityAnalyzer(domain, n)
    warnings = []
    cmax = float(np.max(np.abs(an.eigen.normal_derivs)))
    if an.eigen.extremality_defect > 1e-6 * cmax:
        warnings.append(f"domain is not extremal: |dphi/dnu| varies by "
                        f"{an.eigen.extremality_defect:.3e}")
    k_thr = stopping_threshold(domain, an.lambda1, an.levels[-1].mesh.nodes)
    modes = []
    streak = 0
    reason = None
    for k in range(0, kmax + 1):
        f = an.mode_form(k)
        modes.append(f)
        if k > k_thr and f.m and f.eigenvalues[0] > 0:
            streak += 1
        elif k > k_thr:
            streak = 0
        if streak >= POSITIVE_STREAK:
            reason = f"smallest eigenvalue positive for {POSITIVE_STREAK} modes past k={k_thr}"
            break
    scale = max((float(np.max(np.abs(f.eigenvalues))) for f in modes if f.m), default=1.0)
    tol_abs = null_tol * scale
    index, nullity = _count(modes, tol_abs)
    expected = expected_nullity(domain)
    if index > 0:
        verdict = "unstable"
    elif nullity > expected:
        verdict = "marginal"
    else:
        verdict = "stable"
    report = StabilityReport(
        domain=domain.describe(), lambda1=an.lambda1, modes=modes, morse_index=index,
        nullity=nullity, k_stop=modes[-1].k, k_threshold=k_thr,
        stop_reason=reason or f"kmax={kmax} reached", verdict=verdict,
        null_tol=null_tol, null_tol_abs=tol_abs, expected_nullity=expected,
        warnings=warnings,
    )
    if reason is None:
        raise TruncationInconclusiveError(
            f"no positivity streak before kmax={kmax} on {domain.label()}", report)
    return report


class JacobiMode(NamedTuple):
    k: int
    boundary_vector: np.ndarray
    eigenvalue: float
    multiplicity: int
    # dpsi/dnu + kappa_g v on each circle; constant for a Jacobi field
    jacobi_values: np.ndarray


def jacobi_kernel(report: StabilityReport, analyzer: StabilityAnalyzer) -> list:
    """Null directions of ``Q`` together with ``d(v_hat)/dnu + kappa_g v``
    on each circle (constant for a Jacobi function, zero when ``k >= 1``)."""
    out = []
    for f in report.modes:
        for i, q in enumerate(f.eigenvalues):
            if abs(q) > report.null_tol_abs:
                continue
            v = f.boundary_vector(i)
            vals = []
            for lvl in analyzer.levels:
                ext = solve_extension(lvl, f.k, v)
                vals.append(ext.normal_derivs + analyzer.domain.kappas * v)
            jac = richardson(vals[0], vals[1], analyzer.levels[0].mesh.spacing,
                             analyzer.levels[1].mesh.spacing)
            out.append(JacobiMode(f.k, v, float(q), multiplicity(f.k), np.asarray(jac)))
    return out


# ---------------------------------------------------------------------------
# stability form S(v, v) for test functions on the whole domain


@dataclass(frozen=True)
class FourierTestFunction:
    """``sum profile(r) * cos(k theta)`` (or ``sin``); each term carries its
    profile and the profile's derivative."""

    terms: tuple  # of (k, "cos" | "sin", f, fprime)


def builtin_test_function(name: str, domain: RadialDomain) -> FourierTestFunction:
    """Coordinate functions ``x1, x2, x3`` of the unit sphere in the domain's
    chart, and ``sin-ratio`` = ``sin r / sin r_hi`` on a band."""
    chart = domain.surface.name
    if name == "sin-ratio":
        s0 = math.sin(domain.r_hi)
        return FourierTestFunction(((0, "cos", lambda r: np.sin(r) / s0,
                                     lambda r: np.cos(r) / s0),))
    if chart == "sphere-band":
        radial, dradial, polar, dpolar = np.cos, lambda r: -np.sin(r), np.sin, np.cos
    elif chart == "sphere-polar":
        radial, dradial, polar, dpolar = np.sin, np.cos, np.cos, lambda r: -np.sin(r)
    else:
        raise PreconditionError(f"coordinate functions need a sphere chart, got {chart}")
    table = {
        "x1": (1, "cos", radial, dradial),
        "x2": (1, "sin", radial, dradial),
        "x3": (0, "cos", polar, dpolar),
    }
    if name not in table:
        raise PreconditionError(f"unknown built-in test function {name!r}")
    return FourierTestFunction((table[name],))


class SParts(NamedTuple):
    dirichlet_energy: float
    l2_mass: float
    boundary_term: float
    boundary_mean: float
    value: float


def stability_parts(domain: RadialDomain, lambda1: float,
                    v: Union[str, FourierTestFunction], check_mean: bool = True) -> SParts:
    """Pieces of ``S(v,v) = |grad v|^2 - lambda1 v^2 + boundary kappa_g v^2``
    with analytic angular integrals and Simpson in ``r``."""
    from .numerics import simpson

    if isinstance(v, str):
        v = builtin_test_function(v, domain)
    groups = {}
    for k, kind, f, fp in v.terms:
        if k == 0 and kind == "sin":
            continue
        groups.setdefault((k, kind), []).append((f, fp))
    s = domain.surface
    radii = domain.boundary_radii
    w_b = domain.lengths / (2 * math.pi)
    energy = mass = bterm = mean = 0.0
    for (k, _), parts in sorted(groups.items()):
        f = lambda r, parts=parts: sum(np.asarray(p[0](r), dtype=float) for p in parts)
        fp = lambda r, parts=parts: sum(np.asarray(p[1](r), dtype=float) for p in parts)
        ang = angular_weight(k)

        def grad2(r, f=f, fp=fp, k=k):
            w = np.asarray(s.warp(r), dtype=float)
            fr = f(r)
            with np.errstate(divide="ignore", invalid="ignore"):
                tang = np.where(w > 0, k * k * fr ** 2 / w, 0.0)
            return fp(r) ** 2 * w + tang

        def sq(r, f=f):
            return f(r) ** 2 * np.asarray(s.warp(r), dtype=float)

        energy += ang * simpson(grad2, domain.r_lo, domain.r_hi)
        mass += ang * simpson(sq, domain.r_lo, domain.r_hi)
        fb = f(radii)
        bterm += ang * float(np.sum(domain.kappas * w_b * fb ** 2))
        if k == 0:
            mean += 2 * math.pi * float(np.sum(w_b * fb))
    if check_mean:
        scale = max(abs(energy), mass, 1.0)
        if abs(mean) > 1e-10 * scale:
            raise PreconditionError(
                f"test function has boundary integral {mean:.3e}; S needs zero mean")
    return SParts(energy, mass, bterm, mean, energy - lambda1 * mass + bterm)


def stability_form_S(domain: RadialDomain, lambda1: float,
                     v: Union[str, FourierTestFunction]) -> float:
    return stability_parts(domain, lambda1, v).value


def stability_form_S_sampled(eig: EigenSolution, samples: np.ndarray) -> float:
    """``S(u,u)`` for ``u`` sampled on ``eig.mesh.nodes x theta_j`` with
    ``theta_j = 2 pi j / N``.

    Angular integrals are exact for trigonometric polynomials below the
    Nyquist mode (FFT); the radial part uses the same discrete energy as the
    eigen- and extension solves, with the discrete eigenvalue of the mesh.
    """
    eig = _raw(eig)
    domain, mesh = eig.domain, eig.mesh
    u = np.asarray(samples, dtype=float)
    if u.ndim != 2 or u.shape[0] != mesh.n:
        raise PreconditionError(f"samples must have shape ({mesh.n}, N_theta)")
    nt = u.shape[1]
    coef = np.fft.rfft(u, axis=1) / nt
    B = list(mesh.boundary_index)
    w_b = domain.lengths / (2 * math.pi)
    a0 = coef[:, 0].real
    mean = 2 * math.pi * float(np.sum(w_b * a0[B]))
    if abs(mean) > 1e-10 * max(1.0, float(np.sum(np.abs(w_b * a0[B])))):
        raise PreconditionError(f"test function has boundary integral {mean:.3e}")
    total = 0.0
    for k in range(coef.shape[1]):
        nyquist = nt % 2 == 0 and k == nt // 2
        if k == 0 or nyquist:
            profiles, ang = [coef[:, k].real * (1 if k == 0 else 1)], 2 * math.pi
        else:
            profiles, ang = [2 * coef[:, k].real, -2 * coef[:, k].imag], math.pi
        op = mode_operator(domain, mesh, k)
        A = op.stiffness + sp.diags(op.potential - eig.lambda1 * op.mass)
        for p in profiles:
            total += ang * (float(p @ (A @ p)) + float(np.sum(domain.kappas * w_b * p[B] ** 2)))
    return total
