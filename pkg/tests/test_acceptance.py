"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary (and directly with ``-s``).
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from extremal_domains import oracles
from extremal_domains.geometry import FLAT_TORUS, SPHERE_BAND, SPHERE_POLAR, area, disk, symmetric_band
from extremal_domains.harness import frange
from extremal_domains.radial_eig import fk_profile_point, lambda1_lower_bound, solve_lambda1
from extremal_domains.solver2d import PerturbedBand, hadamard_check_2d
from extremal_domains.stability import (
    StabilityAnalyzer,
    discrete_mode_form,
    jacobi_kernel,
    morse_index,
    solve_extension,
    stability_form_S_sampled,
    stability_parts,
)
from extremal_domains.variation import SLIDE, BandFamily, hadamard_check, second_variation_check
from tests.helpers import random_domain


@pytest.fixture
def record(request):
    store = request.config.__dict__.setdefault("_acceptance_results", {})

    def _record(number, title, ok, detail):
        store[number] = (bool(ok), title, detail)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} -- {detail}")
        assert ok, detail
    return _record


def test_criterion_01_flat_band_closed_form(record):
    worst, slowest = 0.0, 0.0
    for a in (0.2, math.pi / 4, 1.0):
        t0 = time.perf_counter()
        lam = solve_lambda1(symmetric_band(FLAT_TORUS, a), n=2048).lambda1
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(lam - oracles.flat_band_lambda1(a)) / oracles.flat_band_lambda1(a))
    record(1, "flat band lambda1 = (pi/2a)^2", worst <= 1e-8 and slowest < 1.0,
           f"max rel err {worst:.2e} (tol 1e-8), slowest {slowest:.3f}s (limit 1s)")


def test_criterion_02_hemisphere(record):
    eig = solve_lambda1(disk(SPHERE_POLAR, math.pi / 2))
    lam_err = abs(eig.lambda1 - 2.0)
    phi_err = float(np.max(np.abs(eig.phi - oracles.hemisphere_eigenfunction(eig.mesh.nodes))))
    record(2, "hemisphere lambda1 = 2, phi = cos r", lam_err <= 1e-6 and phi_err <= 1e-6,
           f"|lambda1 - 2| = {lam_err:.2e}, max|phi - oracle| = {phi_err:.2e} (tol 1e-6)")


def test_criterion_03_band_integrals(record):
    worst_a = worst_e = 0.0
    for r0 in (math.pi / 6, math.pi / 4, math.pi / 3, 1.2):
        d = symmetric_band(SPHERE_BAND, r0)
        worst_a = max(worst_a, abs(area(d) / oracles.band_area(r0) - 1))
        e = stability_parts(d, 0.0, "sin-ratio", check_mean=False).dirichlet_energy
        worst_e = max(worst_e, abs(e / oracles.sin_ratio_energy(r0) - 1))
    record(3, "area 4 pi sin r0 and energy of sin r/sin r0", max(worst_a, worst_e) <= 1e-8,
           f"area rel err {worst_a:.2e}, energy rel err {worst_e:.2e} (tol 1e-8)")


def test_criterion_04_lower_bound_and_threshold(record):
    grid = frange(0.15, math.pi / 3, 0.05)
    margins, lams = [], []
    for r0 in grid:
        lam = solve_lambda1(symmetric_band(SPHERE_BAND, r0)).lambda1
        margins.append(lam - lambda1_lower_bound(r0))
        lams.append(lam)
    ok = min(margins) >= 0 and min(lams) > 1
    record(4, "lambda1 >= explicit bound and > 1 for r0 < pi/3", ok,
           f"{len(grid)} radii, min(lambda1 - bound) = {min(margins):.3e}, min lambda1 = {min(lams):.4f}")


def test_criterion_05_annulus_instability(record):
    grid = frange(0.15, 1.45, 0.05)
    min_index, max_s = 10 ** 9, -math.inf
    for r0 in grid:
        d = symmetric_band(SPHERE_BAND, r0)
        an = StabilityAnalyzer(d)
        min_index = min(min_index, morse_index(d, analyzer=an).morse_index)
        if r0 >= math.pi / 3:
            max_s = max(max_s, stability_parts(d, an.lambda1, "sin-ratio").value)
    record(5, "symmetric sphere bands unstable on [0.15, 1.45]", min_index >= 1 and max_s < 0,
           f"{len(grid)} radii, min index {min_index}, max S(sin r/sin r0) for r0 >= pi/3 = {max_s:.4f}")


def test_criterion_06_disk_signature(record):
    details, ok = [], True
    for r0 in (0.4, 0.8, 1.2, 1.5):
        d = disk(SPHERE_POLAR, r0)
        an = StabilityAnalyzer(d)
        rep = morse_index(d, analyzer=an)
        eigs = np.concatenate([f.eigenvalues for f in rep.modes if f.m])
        scale = float(np.max(np.abs(eigs)))
        kernel = jacobi_kernel(rep, an)
        ext = an.extension(1, [1.0])
        err = float(np.max(np.abs(ext.psi - oracles.rotation_jacobi_profile(r0, ext.mesh.nodes))))
        ok &= (eigs.min() >= -1e-6 * scale and rep.morse_index == 0 and rep.nullity == 2
               and [j.k for j in kernel] == [1] and err <= 1e-6)
        details.append(f"r0={r0}: index {rep.morse_index} nullity {rep.nullity} oracle {err:.1e}")
    record(6, "geodesic disks: index 0, kernel = rotations at k=1", ok, "; ".join(details))


@pytest.mark.slow
def test_criterion_07_hadamard(record):
    one_d = [hadamard_check(BandFamily(symmetric_band(SPHERE_BAND, 0.7))).rel_error,
             hadamard_check(BandFamily(symmetric_band(FLAT_TORUS, 0.5))).rel_error]
    t0 = time.perf_counter()
    flat = PerturbedBand.unperturbed(SPHERE_BAND, -0.8, 0.8)
    base = replace(flat, rho2=flat.rho2.plus_mode(2, 0.05))
    two_d = hadamard_check_2d(base, 2)
    elapsed = time.perf_counter() - t0
    ok = max(one_d) <= 1e-5 and two_d.rel_error <= 1e-3 and elapsed < 120
    record(7, "Hadamard formula 1D and 2D mode 2", ok,
           f"1D rel err sphere {one_d[0]:.1e} flat {one_d[1]:.1e} (tol 1e-5); "
           f"2D rel err {two_d.rel_error:.1e} (tol 1e-3) in {elapsed:.0f}s")


def test_criterion_08_second_variation(record):
    errs, sign = [], None
    for r0 in (0.6, 1.0, 1.2):
        chk = second_variation_check(BandFamily(symmetric_band(SPHERE_BAND, r0), SLIDE))
        errs.append(chk.rel_error)
        if r0 == 1.2:
            sign = chk.analytic
    record(8, "second variation along the slide", max(errs) <= 1e-3 and sign < 0,
           f"rel errs {', '.join(f'{e:.1e}' for e in errs)} (tol 1e-3); analytic at 1.2 = {sign:.4f}")


def test_criterion_09_quadratic_form_structure(record):
    rng = np.random.default_rng(7)
    sym = 0.0
    for _ in range(50):
        d = random_domain(rng)
        k = int(rng.integers(0, 9))
        an = StabilityAnalyzer(d, 512)
        sym = max(sym, an.mode_form(k).symmetry_defect,
                  *(discrete_mode_form(lvl, k).symmetry_defect for lvl in an.levels))
    d = symmetric_band(SPHERE_BAND, 1.0)
    lvl = StabilityAnalyzer(d).levels[-1]
    v = discrete_mode_form(lvl, 0).boundary_vector(0)
    ext = solve_extension(lvl, 0, v)
    s1 = stability_form_S_sampled(lvl, np.outer(ext.psi, np.ones(4)))
    s2 = stability_form_S_sampled(lvl, np.outer(ext.psi - 0.8 * lvl.phi, np.ones(4)))
    defl = abs(s1 - s2)
    sq = 0.0
    for k in range(5):
        f = discrete_mode_form(lvl, k)
        for i in range(f.m):
            e = solve_extension(lvl, k, f.boundary_vector(i))
            th = 2 * math.pi * np.arange(4 * k + 8) / (4 * k + 8)
            sq = max(sq, abs(stability_form_S_sampled(lvl, np.outer(e.psi, np.cos(k * th)))
                             - f.eigenvalues[i]))
    record(9, "Green symmetry, deflation independence, S = Q",
           sym <= 1e-8 and defl <= 1e-9 and sq <= 1e-7,
           f"symmetry {sym:.1e} (1e-8), deflation {defl:.1e} (1e-9), S-Q {sq:.1e} (1e-7)")


def test_criterion_10_faber_krahn(record):
    target = math.pi * oracles.UNIT_DISK_LAMBDA1
    dev5 = abs(fk_profile_point(0.05).product / target - 1)
    dev2 = abs(fk_profile_point(0.02).product / target - 1)
    wins = []
    for m in (1.0, 2.0, 4.0, 6.0):
        ld = solve_lambda1(disk(SPHERE_POLAR, math.acos(1 - m / (2 * math.pi)))).lambda1
        lb = solve_lambda1(symmetric_band(SPHERE_BAND, math.asin(m / (4 * math.pi)))).lambda1
        wins.append(ld < lb)
    record(10, "small disks approach pi j0^2; disks beat bands", dev5 <= 0.02 and dev2 <= 0.005
           and all(wins), f"deviation {dev5:.2%} at 0.05 (2%), {dev2:.3%} at 0.02 (0.5%), "
           f"disk < band for m=1,2,4,6: {wins}")


def test_criterion_11_coordinate_identity(record):
    worst, signs = 0.0, []
    for r0 in (0.5, 1.0, 1.35):
        d = symmetric_band(SPHERE_BAND, r0)
        lam = solve_lambda1(d).lambda1
        total = sum(stability_parts(d, lam, x, check_mean=False).value for x in ("x1", "x2", "x3"))
        closed = float(np.sum(d.lengths * d.kappas)) + (2 - lam) * area(d)
        worst = max(worst, abs(total - closed) / abs(closed))
        signs.append((total < 0) == (lam > 1))
    record(11, "sum of S(x_i, x_i) = total curvature + (2 - lambda1) area", worst <= 1e-8 and all(signs),
           f"max rel err {worst:.1e} (tol 1e-8); sign negative exactly when lambda1 > 1: {signs}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
