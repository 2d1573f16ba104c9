import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremal_domains import oracles
from extremal_domains.errors import (
    FredholmViolationError,
    PreconditionError,
    ResonanceError,
    TruncationInconclusiveError,
)
from extremal_domains.geometry import FLAT_TORUS, SPHERE_BAND, SPHERE_POLAR, band, disk, symmetric_band
from extremal_domains.stability import (
    StabilityAnalyzer,
    discrete_mode_form,
    jacobi_kernel,
    mode_form,
    morse_index,
    solve_extension,
    stability_form_S,
    stability_form_S_sampled,
    stability_parts,
)


def flat_index_oracle(a, kmax=40):
    """Index and nullity of a flat band from the closed-form mode maps."""
    lam = oracles.flat_band_lambda1(a)
    index = nullity = 0
    # mode 0: only the odd (translation) direction is admissible
    odd0 = oracles.flat_mode_dtn(a, 0, lam)[1]
    index += odd0 < -1e-9
    nullity += abs(odd0) <= 1e-9
    for k in range(1, kmax):
        for q in oracles.flat_mode_dtn(a, k, lam):
            index += 2 * (q < -1e-9)
            nullity += 2 * (abs(q) <= 1e-9)
    return index, nullity


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 2.8), st.integers(1, 12))
def test_flat_mode_form_matches_closed_form(a, k):
    an = StabilityAnalyzer(symmetric_band(FLAT_TORUS, a), 512)
    lam = an.lambda1
    # k^2 < lam is fine: sqrt(lam - k^2) a < pi/2 keeps the trigonometric branch finite
    expected = sorted(oracles.flat_mode_dtn(a, k, lam))
    got = an.mode_form(k).eigenvalues / math.pi
    # fourth-order error ~ (k h)^4 at n=512 reaches ~1e-6 at k=12, a=2.8
    assert np.allclose(got, expected, rtol=5e-6, atol=1e-7)


def test_hyperbolic_extension_profile():
    a, k = 0.4, 5
    d = symmetric_band(FLAT_TORUS, a)
    an = StabilityAnalyzer(d)
    mu = math.sqrt(k * k - oracles.flat_band_lambda1(a))
    ext = an.extension(k, [1.0, 1.0])
    r = ext.mesh.nodes
    assert np.max(np.abs(ext.psi - np.cosh(mu * r) / np.cosh(mu * a))) < 1e-6
    assert np.allclose(ext.normal_derivs, mu * math.tanh(mu * a), rtol=1e-5)
    assert ext.psi[0] == 1.0 and ext.psi[-1] == 1.0
    assert not ext.deflated


def test_fredholm_violation():
    an = StabilityAnalyzer(symmetric_band(SPHERE_BAND, 0.6), 256)
    with pytest.raises(FredholmViolationError):
        an.extension(0, [1.0, 1.0])
    with pytest.raises(PreconditionError):
        an.extension(1, [1.0])


def test_deflated_extension_is_orthogonal_to_eigenfunction():
    d = band(SPHERE_BAND, -0.4, 0.9)
    an = StabilityAnalyzer(d, 512)
    lvl = an.levels[-1]
    v = np.array([d.lengths[1], -d.lengths[0]])
    ext = solve_extension(lvl, 0, v)
    from extremal_domains.radial_eig import mode_operator

    mass = mode_operator(d, lvl.mesh, 0).mass
    assert ext.deflated
    assert abs(2 * math.pi * float(mass @ (ext.psi * lvl.phi))) <= 1e-10
    assert np.array_equal(ext.psi[[0, -1]], v)


def test_green_symmetry_and_mode_dimensions():
    b = StabilityAnalyzer(band(SPHERE_BAND, -0.5, 1.2), 512)
    for k in range(6):
        f = b.mode_form(k)
        assert f.m == (1 if k == 0 else 2)
        assert f.symmetry_defect <= 1e-8
        assert np.all(np.diff(f.eigenvalues) >= 0)
    dk = StabilityAnalyzer(disk(SPHERE_POLAR, 1.0), 512)
    assert dk.mode_form(0).m == 0 and dk.mode_form(3).m == 1


@pytest.mark.parametrize("r0", [0.4, 0.8, 1.2])
def test_disk_rotation_jacobi(r0):
    d = disk(SPHERE_POLAR, r0)
    an = StabilityAnalyzer(d)
    assert abs(an.mode_form(1).eigenvalues[0]) <= 1e-6
    ext = an.extension(1, [1.0])
    ref = oracles.rotation_jacobi_profile(r0, ext.mesh.nodes)
    assert np.max(np.abs(ext.psi - ref)) <= 1e-6
    rep = morse_index(d, analyzer=an)
    assert (rep.morse_index, rep.nullity, rep.verdict) == (0, 2, "stable")
    kernel = jacobi_kernel(rep, an)
    assert [j.k for j in kernel] == [1] and kernel[0].multiplicity == 2
    assert np.max(np.abs(kernel[0].jacobi_values)) <= 1e-6


@pytest.mark.parametrize("r0", [0.3, 0.6, math.pi / 3, 1.2])
def test_sphere_bands_unstable(r0):
    d = symmetric_band(SPHERE_BAND, r0)
    an = StabilityAnalyzer(d)
    rep = morse_index(d, analyzer=an)
    assert rep.morse_index >= 1 and rep.verdict == "unstable"
    assert 1 in [j.k for j in jacobi_kernel(rep, an)]


@pytest.mark.parametrize("a", [0.3, 1.0, 2.0, 2.5])
def test_flat_band_index_matches_oracle(a):
    rep = morse_index(symmetric_band(FLAT_TORUS, a))
    assert (rep.morse_index, rep.nullity) == flat_index_oracle(a)


def test_wide_flat_band_is_stable_with_translation_kernel():
    d = symmetric_band(FLAT_TORUS, 2.0)
    an = StabilityAnalyzer(d)
    rep = morse_index(d, analyzer=an)
    assert rep.verdict == "stable" and rep.nullity == 1 == rep.expected_nullity
    (jac,) = jacobi_kernel(rep, an)
    assert jac.k == 0 and np.ptp(jac.jacobi_values) <= 1e-6


def test_truncation_is_reported():
    with pytest.raises(TruncationInconclusiveError) as info:
        morse_index(symmetric_band(SPHERE_BAND, 0.15), kmax=3, n=256)
    assert info.value.report is not None and info.value.report.k_stop == 3


def test_non_extremal_domain_warns():
    rep = morse_index(band(SPHERE_BAND, -0.3, 0.9), n=256)
    assert any("not extremal" in w for w in rep.warnings)


def test_resonance_detected():
    d = symmetric_band(SPHERE_BAND, 0.8)
    an = StabilityAnalyzer(d, 256)
    fake = replace(an.levels[0], lambda1=200.0)
    with pytest.raises(ResonanceError):
        solve_extension(fake, 1, [1.0, 0.0])


def test_mode_tail_nondecreasing():
    for d in (symmetric_band(SPHERE_BAND, 0.9), disk(SPHERE_POLAR, 1.1), symmetric_band(FLAT_TORUS, 0.7)):
        rep = morse_index(d, n=512)
        tail = [f.eigenvalues[0] for f in rep.modes if f.k > rep.k_threshold]
        assert np.all(np.diff(tail) >= 0)


def test_table_rows_and_dict():
    rep = morse_index(disk(SPHERE_POLAR, 0.8), n=256)
    rows = rep.table_rows()
    assert rows[0][:2] == [0, 0] and rows[1][:2] == [1, 1]
    assert rep.to_dict()["verdict"] == "stable"


def test_S_builtins():
    r0 = 1.1
    d = symmetric_band(SPHERE_BAND, r0)
    from extremal_domains.radial_eig import solve_lambda1

    lam = solve_lambda1(d).lambda1
    parts = stability_parts(d, lam, "sin-ratio")
    assert parts.dirichlet_energy == pytest.approx(oracles.sin_ratio_energy(r0), rel=1e-10)
    assert parts.value < 0
    assert stability_parts(d, lam, "x3").boundary_mean == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        stability_form_S(disk(SPHERE_POLAR, 0.7), 5.0, "x3")
    with pytest.raises(PreconditionError):
        stability_form_S(symmetric_band(FLAT_TORUS, 0.7), 5.0, "x1")


def test_sampled_S_equals_quadratic_form():
    d = band(SPHERE_BAND, -0.6, 1.1)
    lvl = StabilityAnalyzer(d, 512).levels[-1]
    for k in range(4):
        f = discrete_mode_form(lvl, k)
        for i in range(f.m):
            ext = solve_extension(lvl, k, f.boundary_vector(i))
            th = 2 * math.pi * np.arange(16) / 16
            s = stability_form_S_sampled(lvl, np.outer(ext.psi, np.cos(k * th)))
            assert s == pytest.approx(f.eigenvalues[i], abs=1e-7)


def test_sampled_S_matches_quadrature_S():
    d = symmetric_band(SPHERE_BAND, 0.9)
    an = StabilityAnalyzer(d, 2048)
    lvl = an.levels[-1]
    th = 2 * math.pi * np.arange(8) / 8
    u = np.outer(np.cos(lvl.mesh.nodes), np.cos(th))
    assert stability_form_S_sampled(lvl, u) == pytest.approx(stability_form_S(d, lvl.lambda1, "x1"),
                                                             rel=1e-5)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_extension_minimizes_S(k, seed):
    d = symmetric_band(SPHERE_BAND, 0.7)
    lvl = StabilityAnalyzer(d, 256).levels[-1]
    f = discrete_mode_form(lvl, k)
    v = f.boundary_vector(0)
    ext = solve_extension(lvl, k, v)
    rng = np.random.default_rng(seed)
    r = lvl.mesh.nodes
    bump = np.sin(math.pi * (r - r[0]) / (r[-1] - r[0]))
    nt = 16
    th = 2 * math.pi * np.arange(nt) / nt
    u = np.outer(ext.psi, np.cos(k * th))
    for j in range(1, 4):
        u += rng.normal() * np.outer(bump ** j, np.cos(int(rng.integers(0, 5)) * th))
    q = f.eigenvalues[0]
    assert stability_form_S_sampled(lvl, u) >= q - 1e-7


def test_mode_form_helper():
    f = mode_form(symmetric_band(FLAT_TORUS, 1.0), 3, n=256)
    assert f.k == 3 and f.m == 2
