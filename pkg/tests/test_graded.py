"""Exterior calculus as matrix-valued differential operators."""

import numpy as np
import pytest

from kvnlab.checks import cartan_rows, charge_algebra_rows, standard_hamiltonians
from kvnlab.graded import (
    GradedDiffOp,
    charge,
    codifferential,
    exterior_derivative,
    graded_commutator,
    hodge_star,
    htilde,
    htilde_fermionic,
    irrep_matrices,
)
from kvnlab.polyfield import PolyField, poly_variable
from kvnlab.sector import sector_dim


def test_cartan_identity_suite_exact():
    for row in cartan_rows(1):
        assert row["residual"] == 0.0, row


def test_exterior_derivative_nilpotent_two_dof():
    d = exterior_derivative(2)
    assert d.compose(d).max_abs_coeff() == 0.0
    delta = codifferential(2)
    assert delta.compose(delta).max_abs_coeff() == 0.0


def test_hodge_star_single_dof_anchor():
    # on (1, c^q, c^p, c^p c^q): *1 = c^q c^p, *c^q = c^p, *c^p = -c^q,
    # *(c^p c^q) = -1
    want = np.array(
        [
            [0, 0, 0, -1],
            [0, 0, -1, 0],
            [0, 1, 0, 0],
            [-1, 0, 0, 0],
        ],
        dtype=float,
    )
    assert np.allclose(np.asarray(hodge_star(1)), want)


def test_evolution_operator_one_form_block():
    # H = p^2/2 + q^3: the one-form block couples through the Hessian
    H = standard_hamiltonians(1)["p^2/2+q^3"]
    op = htilde(H)
    ferm = htilde_fermionic(H)
    # fermionic part is derivative-free and traceless on the diagonal sector
    for deriv, mat in ferm.terms.items():
        assert not any(deriv)
    # coupling entries: i * omega^{ab} d_b d_d H
    mat = next(iter(ferm.terms.values()))
    # entry (q-form row, p-form column) carries i * d^2H/dq^2 = 6iq
    q = poly_variable(1, ("q", 1))
    assert (mat[(1, 2)] - 6j * q).is_zero()
    assert (mat[(2, 1)] - PolyField.constant(1, -1j)).is_zero()


def test_charge_algebra_suite_exact():
    for row in charge_algebra_rows(1, beta=1.3):
        assert row["residual"] == 0.0, row


def test_central_term_scales_with_dof_count():
    for n in (1, 2):
        lhs = graded_commutator(charge(n, "K"), charge(n, "Kbar"), "-")
        target = charge(n, "Qf") + GradedDiffOp.from_sector(
            n, -n * np.eye(sector_dim(n))
        )
        assert (lhs - target).max_abs_coeff() == 0.0


def test_irrep_matrices_close_on_scalar_hamiltonian():
    h = 2.25
    m = irrep_matrices(h)
    rh = np.sqrt(h)
    assert np.allclose(m["H"], h * np.eye(4))
    assert np.allclose(m["Qf"], np.diag([0.0, 1.0, 1.0, 2.0]))
    anti = m["Q"] @ m["-iNbar"] + m["-iNbar"] @ m["Q"]
    assert np.allclose(anti, h * np.eye(4))
    anti = m["Qbar"] @ m["iN"] + m["iN"] @ m["Qbar"]
    assert np.allclose(anti, h * np.eye(4))
    for a in ("Q", "Qbar"):
        assert np.allclose(m[a] @ m[a], 0.0)
    # commutant of the irreducible action is trivial: only multiples of 1
    gens = [m[k] for k in ("Q", "Qbar", "iN", "-iNbar", "Qf", "K", "Kbar")]
    rows = []
    for g in gens:
        rows.append(np.kron(np.eye(4), g) - np.kron(g.T, np.eye(4)))
    null = np.linalg.svd(np.vstack(rows), compute_uv=False)
    assert np.sum(null <= 1e-10 * null[0]) == 1


def test_supersymmetry_charge_squares_to_zero():
    for n in (1, 2):
        Q = charge(n, "Q")
        assert graded_commutator(Q, Q, "+").max_abs_coeff() == 0.0
