"""Sector metrics, adjoints, hermiticity scans and transport norms."""

import numpy as np
import pytest
from scipy.linalg import expm

from kvnlab.checks import standard_hamiltonians
from kvnlab.graded import htilde, htilde_fermionic
from kvnlab.metrics import (
    adjoint,
    build_metric,
    classify_metric,
    fermionic_kernel_dimension,
    hermiticity_report,
    jacobi_norm_evolution,
    metric_eigenvalues,
    nogo_scan,
    physical_basis,
)
from kvnlab.polyfield import PolyField, poly_from_dict


def _harmonic():
    # p^2/2 + q^2/2, internal slot order (p, q)
    return poly_from_dict(1, {(2, 0): 0.5, (0, 2): 0.5})


def _quartic():
    return poly_from_dict(1, {(2, 0): 0.5, (0, 4): 1.0})


def _inverted():
    return poly_from_dict(1, {(2, 0): 0.5, (0, 2): -0.5})


def test_flat_metric_is_identity():
    m = build_metric("svh", 1)
    assert np.allclose(m.g, np.eye(4))
    assert classify_metric(m) == "positive-definite"


def test_gauge_metric_anchor_and_witness():
    m = build_metric("gauge", 1)
    want = np.array(
        [
            [0, 0, 0, -1j],
            [0, 0, -1j, 0],
            [0, 1j, 0, 0],
            [1j, 0, 0, 0],
        ]
    )
    assert np.allclose(m.g, want)
    assert np.allclose(sorted(metric_eigenvalues(m)), [-1, -1, 1, 1])
    # a zero-norm-defying state: mixing top and bottom forms gives norm -2
    psi = np.array([1.0, 0.0, 0.0, -1j])
    assert m.norm2(psi) == pytest.approx(-2.0, abs=1e-12)
    assert classify_metric(m) == "indefinite"


def test_one_parameter_symplectic_family_eigenvalues():
    m = build_metric("genSymplectic", 1, {"b": 2.0})
    assert np.allclose(sorted(metric_eigenvalues(m)), [-4.0, -2.0, 1.0, 2.0],
                       atol=1e-10)


def test_symplectic_metric_single_dof_blocks():
    m = build_metric("symplectic", 1)
    want = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 1j, 0],
            [0, -1j, 0, 0],
            [0, 0, 0, -1],
        ]
    )
    assert np.allclose(m.g, want)


def test_non_hermitian_parameters_rejected():
    with pytest.raises(ValueError, match="not Hermitian"):
        build_metric("genGaugeA", 1, {"g03": 1.0})


def test_adjoint_is_an_involution():
    m = build_metric("svh", 1)
    for H in standard_hamiltonians(1).values():
        op = htilde(H)
        assert (adjoint(adjoint(op, m), m) - op).max_abs_coeff() < 1e-12


def test_flat_metric_hermitian_only_for_unit_frequency():
    m = build_metric("svh", 1)
    assert hermiticity_report(_harmonic(), m).verdict == "hermitian"
    assert hermiticity_report(_harmonic(), m).residual == 0.0
    # detuned harmonic and anharmonic potentials both break hermiticity
    detuned = standard_hamiltonians(1)["p^2/2+q^2"]
    assert hermiticity_report(detuned, m).verdict == "non-hermitian"
    rep = hermiticity_report(_quartic(), m)
    assert rep.verdict == "non-hermitian"
    assert rep.residual > 1.0


def test_indefinite_metrics_hermitian_for_all_scanned_hamiltonians():
    hams = list(standard_hamiltonians(1).values()) + [_harmonic(), _quartic()]
    for kind in ("gauge", "symplectic"):
        m = build_metric(kind, 1)
        for H in hams:
            assert hermiticity_report(H, m).verdict == "hermitian", (kind, H)


def test_scan_finds_no_positive_hermitian_metric():
    hams = list(standard_hamiltonians(1).values()) + [_harmonic(), _quartic()]
    metrics = [
        build_metric("svh", 1),
        build_metric("gauge", 1),
        build_metric("symplectic", 1),
        build_metric("genSymplectic", 1, {"b": 2.0}),
    ]
    rows = nogo_scan(hams, metrics)
    assert len(rows) == len(metrics)
    for row in rows:
        assert not (row["positive"] and row["hermitian_all"]), row


def _fermionic_matrix(H, point):
    ferm = htilde_fermionic(H)
    dim = 2 ** (2 * H.n)
    mat = np.zeros((dim, dim), dtype=complex)
    for deriv, md in ferm.terms.items():
        assert not any(deriv)
        for (i, j), poly in md.items():
            mat[i, j] += poly(point)
    return mat


def test_physical_basis_annihilated_by_form_mixing():
    rng = np.random.default_rng(3)
    n = 2
    A = rng.standard_normal((2 * n, 2 * n))
    A = A + A.T
    terms = {}
    for a in range(2 * n):
        for b in range(a, 2 * n):
            e = [0] * (2 * n)
            e[a] += 1
            e[b] += 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + A[a, b]
    H = PolyField(n, terms)
    mat = _fermionic_matrix(H, rng.standard_normal(2 * n))
    for kind in ("svh", "symplectic"):
        for entry in physical_basis(kind, n):
            resid = np.max(np.abs(mat @ entry["vector"]))
            assert resid < 1e-12, (kind, entry["label"], resid)


def test_kernel_dimension_matches_family_size():
    n = 2
    basis = physical_basis("svh", n)
    per_degree = {}
    for entry in basis:
        per_degree[entry["degree"]] = per_degree.get(entry["degree"], 0) + 1
    for degree, count in per_degree.items():
        assert fermionic_kernel_dimension(n, degree) == count


def test_transport_norm_conserved_for_harmonic():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((5, 2))
    cov = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    out = jacobi_norm_evolution(_harmonic(), pts, cov, t=2.0)
    assert np.max(np.abs(out["norm_form"] - out["norm_form"][0])) < 1e-8
    # one-form components and trajectory separations agree pointwise
    assert np.max(np.abs(out["norm_form"] - out["norm_jacobi"])) < 1e-6
    # closed-form check: the linearized harmonic flow is a rigid rotation
    M = np.array([[0.0, -1.0], [1.0, 0.0]])
    want = cov @ expm(2.0 * M).T
    assert np.max(np.abs(out["final_form"] - want)) < 1e-6


def test_transport_norm_grows_for_inverted_potential():
    # seed the expanding direction: growth rate of the squared norm is
    # exactly twice the Lyapunov exponent (= 1 here)
    pts = np.array([[0.3, -0.2]])
    cov = np.array([[1.0, 1.0]]) / np.sqrt(2.0)
    t = 2.0
    out = jacobi_norm_evolution(_inverted(), pts, cov, t=t)
    M = np.array([[0.0, 1.0], [1.0, 0.0]])
    want = cov @ expm(t * M).T
    assert np.max(np.abs(out["final_form"] - want)) < 1e-6
    assert np.max(np.abs(out["norm_form"] - out["norm_jacobi"])) < 1e-6
    rate = np.log(out["norm_form"][-1] / out["norm_form"][0]) / t
    assert rate == pytest.approx(2.0, rel=0.02)
