"""Gauge coupling rules, uniform-field and flux-line spectra."""

import mpmath
import numpy as np
import pytest

from kvnlab.dynamics import (
    gaussian_phase_space_state,
    make_axis,
    to_mixed_representation,
)
from kvnlab.gauge import (
    GaugeField,
    ab_spectra,
    bessel_zero,
    gauge_transform,
    landau_hamiltonian,
    landau_spectrum,
    minimal_coupling,
    quantum_landau_levels,
    superfield_coupling,
)
from kvnlab.graded import GradedDiffOp, graded_commutator, htilde
from kvnlab.polyfield import poly_variable
from kvnlab.sector import sector_dim
from kvnlab.superpoly import (
    SuperPoly,
    berezin_integral,
    script_h,
    superfield,
)


def test_field_kind_validation():
    with pytest.raises(ValueError, match="unknown gauge field"):
        GaugeField(kind="monopole")


def test_uniform_field_substitution_rules():
    field = GaugeField(kind="landau", B=2.5)
    n = 2
    # p_y picks up -B x; lambda_y picks up +B lambda_{p_x}
    out = minimal_coupling(SuperPoly.phi(n, 3), field)
    want = SuperPoly.phi(n, 3) - 2.5 * SuperPoly.phi(n, 2)
    assert (out - want).max_abs_coeff() == 0.0
    out = minimal_coupling(SuperPoly.lam(n, 4), field)
    want = SuperPoly.lam(n, 4) + 2.5 * SuperPoly.lam(n, 1)
    assert (out - want).max_abs_coeff() == 0.0
    # untouched variables pass through
    out = minimal_coupling(SuperPoly.phi(n, 1) * SuperPoly.lam(n, 2), field)
    assert (out - SuperPoly.phi(n, 1) * SuperPoly.lam(n, 2)
            ).max_abs_coeff() == 0.0


def test_zero_field_coupling_is_identity():
    op = SuperPoly.phi(2, 3) * SuperPoly.lam(2, 4)
    assert minimal_coupling(op, GaugeField(kind="landau", B=0.0)) is op


def test_flux_line_rejected_symbolically():
    with pytest.raises(ValueError, match="flux_line"):
        minimal_coupling(SuperPoly.phi(2, 3),
                         GaugeField(kind="flux_line", Phi_B=1.0))


def test_superfield_route_reproduces_coupled_evolution_operator():
    n, B, mass = 2, 1.7, 1.0
    field = GaugeField(kind="landau", B=B)
    combo = superfield_coupling(n, field)["superfield"]
    fields = [superfield(n, a) for a in range(1, 2 * n + 1)]
    fields[2] = combo  # slot 3 = p_y
    # free kinetic Hamiltonian over the substituted superfields
    H_free = (
        poly_variable(n, ("p", 1)) ** 2 + poly_variable(n, ("p", 2)) ** 2
    ) * (0.5 / mass)
    total = SuperPoly.constant(n, 0.0)
    for exp, coeff in H_free.terms.items():
        mono = SuperPoly.constant(n, coeff)
        for slot, e in enumerate(exp):
            for _ in range(e):
                mono = mono * fields[slot]
        total = total + mono
    lhs = berezin_integral(total) * 1j
    rhs = script_h(landau_hamiltonian(B, mass, n))
    assert (lhs - rhs).max_abs_coeff() < 1e-12


def test_gauge_transform_commutes_with_representation_change():
    q = make_axis(-10.0, 10.0, 128)
    p = make_axis(-12.0, 12.0, 512)
    psi = gaussian_phase_space_state(q, p, a=1.0, b=1.0)
    dalpha = lambda x: 0.8 * np.tanh(x)
    route_a = to_mixed_representation(gauge_transform(psi, dalpha, "(q,p)"))
    route_b = gauge_transform(to_mixed_representation(psi), dalpha,
                              "(q,lambda_p)")
    # limited by the momentum-shift interpolation; improves with resolution
    assert np.max(np.abs(route_a.values - route_b.values)) < 1e-7


def test_gauge_transform_argument_validation():
    q = make_axis(-5.0, 5.0, 32)
    p = make_axis(-5.0, 5.0, 32)
    psi = gaussian_phase_space_state(q, p, a=1.0, b=1.0)
    with pytest.raises(ValueError, match="expected a"):
        gauge_transform(psi, lambda x: x, "(q,lambda_p)")
    with pytest.raises(ValueError, match="unknown representation"):
        gauge_transform(psi, lambda x: x, "(p,q)")
    with pytest.raises(ValueError, match="too large"):
        gauge_transform(psi, lambda x: 20.0 * x, "(q,p)")


def test_uniform_field_spectrum_integer_lattice():
    B, mass, N_tr = 2.0, 1.0, 12
    out = landau_spectrum(B, N_tr, mass, fd_check=True, fd_grid=96,
                          fd_levels=20)
    omega = out["omega"]
    assert omega == B / mass
    res = out["classical"]
    ratios = res.eigenvalues / omega
    assert np.max(np.abs(ratios - np.round(ratios))) == 0.0
    for lab, deg in zip(res.labels, res.degeneracies):
        N = int(lab.split("=")[1])
        assert deg == N_tr - abs(N)
    assert out["fd_max_cluster_deviation"] < 0.05 * omega


def test_quantum_landau_levels_keep_zero_point():
    res = quantum_landau_levels(B=2.0, n_max=3)
    assert np.allclose(res.eigenvalues, 2.0 * (np.arange(4) + 0.5))


def _mult_op(poly):
    return GradedDiffOp.from_sector(poly.n, np.eye(sector_dim(poly.n)), poly)


def test_drift_center_constants_commute_with_evolution():
    n, B, mass = 2, 1.3, 1.0
    H = landau_hamiltonian(B, mass, n)
    op = htilde(H)
    x = poly_variable(n, ("q", 1))
    y = poly_variable(n, ("q", 2))
    px = poly_variable(n, ("p", 1))
    py = poly_variable(n, ("p", 2))
    vx = px * (1.0 / mass)
    vy = (py - B * x) * (1.0 / mass)
    omega = B / mass
    x0 = x + vy * (1.0 / omega)
    y0 = y - vx * (1.0 / omega)
    rho2 = (vx * vx + vy * vy) * (1.0 / omega**2)
    for const in (x0, y0, rho2):
        resid = graded_commutator(op, _mult_op(const), "-").max_abs_coeff()
        assert resid == 0.0


def _j0_series(x, terms=60):
    # ascending series sum_k (-1)^k (x/2)^{2k} / (k!)^2
    total, term = 0.0, 1.0
    for k in range(terms):
        total += term
        term *= -(x / 2) ** 2 / ((k + 1) ** 2)
    return total


def test_first_bessel_zero_against_series_bisection():
    lo, hi = 2.0, 3.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _j0_series(lo) * _j0_series(mid) <= 0:
            hi = mid
        else:
            lo = mid
    assert bessel_zero(0, 1) == pytest.approx(0.5 * (lo + hi), abs=1e-10)


def test_bessel_zero_counting_convention():
    # J_nu(0) = 0 for nu > 0, so the origin carries the first label
    assert bessel_zero(1, 1) == 0.0
    assert bessel_zero(1, 2) == pytest.approx(3.8317059702075123, abs=1e-10)
    assert bessel_zero(0.9, 2) == pytest.approx(3.6963478880936076, abs=1e-8)
    assert bessel_zero(0, 1) == pytest.approx(2.4048255576957728, abs=1e-10)
    # cross-check against an independent multiprecision implementation
    for nu in (0, 1, 2):
        for kpos in (1, 2, 3):
            k = kpos if nu == 0 else kpos + 1
            assert bessel_zero(nu, k) == pytest.approx(
                float(mpmath.besseljzero(nu, kpos)), abs=1e-10
            )


def test_bessel_zero_argument_validation():
    with pytest.raises(ValueError):
        bessel_zero(-0.5, 1)
    with pytest.raises(ValueError):
        bessel_zero(1, 0)
    with pytest.raises(ValueError):
        bessel_zero(51, 1)


def test_flux_line_spectra():
    out = ab_spectra(0.9, b=1.0, levels=[(2, 1), (2, 0)])
    rows = {(r["k"], r["m"]): r for r in out["quantum"]}
    # free level (k=2, m=1): alpha^2/2 with alpha = 3.8317...
    assert rows[(2, 1)]["E_free"] == pytest.approx(3.8317059702**2 / 2,
                                                   abs=1e-6)
    # flux shifts the m=0 sector to order 0.9
    assert rows[(2, 0)]["E_flux"] == pytest.approx(3.6963478881**2 / 2,
                                                   abs=1e-6)
    # the classical operator is unchanged by the flux, entry by entry
    # (up to rounding of the canonical-label shift near the axis)
    assert out["classical_elementwise_deviation"] <= 1e-10
    assert out["classical_identical"]
    assert np.allclose(out["classical_eigs_free"],
                       out["classical_eigs_flux"])


def test_small_flux_lowers_positive_angular_levels():
    base = ab_spectra(0.0, b=1.0, levels=[(2, 1)])["quantum"][0]
    shifted = ab_spectra(0.1, b=1.0, levels=[(2, 1)])["quantum"][0]
    assert shifted["E_flux"] < base["E_free"]
    assert base["E_flux"] == pytest.approx(base["E_free"], abs=1e-12)
    with pytest.raises(ValueError, match="flux_alpha"):
        ab_spectra(1.5, b=1.0, levels=[(1, 0)])
