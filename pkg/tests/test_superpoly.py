"""Graded symbol algebra, extended brackets and superfields."""

import numpy as np

from kvnlab.checks import bracket_rows, random_polynomial
from kvnlab.polyfield import PolyField, poly_variable
from kvnlab.superpoly import (
    SuperPoly,
    TensorSpec,
    berezin_integral,
    cartan_via_epb,
    charge_poly,
    epb,
    fn_bracket,
    hat_map,
    nr_bracket,
    script_h,
    superfield_expand,
)


def _rand_superpoly(n, rng, fermions=True):
    out = SuperPoly.constant(n, 0.0)
    gens = [SuperPoly.phi(n, a) for a in range(1, 2 * n + 1)]
    gens += [SuperPoly.lam(n, a) for a in range(1, 2 * n + 1)]
    ferm = [SuperPoly.c(n, a) for a in range(1, 2 * n + 1)]
    ferm += [SuperPoly.cbar(n, a) for a in range(1, 2 * n + 1)]
    for _ in range(4):
        term = SuperPoly.constant(n, complex(*rng.standard_normal(2)))
        for g in rng.choice(len(gens), size=2):
            term = term * gens[g]
        if fermions and rng.random() < 0.7:
            k = int(rng.integers(0, 3))
            for g in rng.choice(len(ferm), size=k, replace=False):
                term = term * ferm[g]
        out = out + term
    return out


def _rand_homogeneous(n, rng):
    """Random element of definite fermion parity, with that parity."""
    parity = int(rng.integers(0, 2))
    S = _rand_superpoly(n, rng).parity_part(parity)
    return S, parity


def test_fundamental_bracket_values():
    n = 1
    q = SuperPoly.phi(n, 2)
    lam_q = SuperPoly.lam(n, 2)
    assert (epb(q, lam_q) - SuperPoly.constant(n, 1.0)).max_abs_coeff() == 0.0
    c = SuperPoly.c(n, 1)
    cb = SuperPoly.cbar(n, 1)
    assert (epb(cb, c) - SuperPoly.constant(n, -1j)).max_abs_coeff() == 0.0


def test_bracket_graded_antisymmetry_and_jacobi():
    rng = np.random.default_rng(11)
    n = 1
    for _ in range(6):
        F, f = _rand_homogeneous(n, rng)
        G, g = _rand_homogeneous(n, rng)
        H, h = _rand_homogeneous(n, rng)
        anti = epb(F, G) + (-1.0) ** (f * g) * epb(G, F)
        assert anti.max_abs_coeff() < 1e-10
        jac = (
            epb(F, epb(G, H)) * (-1.0) ** (f * h)
            + epb(G, epb(H, F)) * (-1.0) ** (g * f)
            + epb(H, epb(F, G)) * (-1.0) ** (h * g)
        )
        assert jac.max_abs_coeff() < 1e-9


def test_bracket_leibniz_rule():
    rng = np.random.default_rng(4)
    n = 1
    for _ in range(4):
        F, f = _rand_homogeneous(n, rng)
        G, g = _rand_homogeneous(n, rng)
        H = _rand_superpoly(n, rng)
        lhs = epb(F, G * H)
        rhs = epb(F, G) * H + (-1.0) ** (f * g) * G * epb(F, H)
        assert (lhs - rhs).max_abs_coeff() < 1e-10


def test_exterior_derivative_via_charge():
    n = 1
    f = random_polynomial(n, np.random.default_rng(2), max_degree=3)
    df = cartan_via_epb(n, "d", SuperPoly.from_polyfield(f))
    want = SuperPoly.constant(n, 0.0)
    for a in range(1, 2 * n + 1):
        want = want + SuperPoly.c(n, a) * SuperPoly.from_polyfield(f.diff(a))
    assert (df - want).max_abs_coeff() == 0.0


def test_form_counting_charge():
    n = 1
    word = SuperPoly.c(n, 1) * SuperPoly.c(n, 2)
    qf = charge_poly(n, "Qf")
    assert (epb(qf, word) * 1j - 2.0 * word).max_abs_coeff() < 1e-12


def test_cartan_magic_formula_via_brackets():
    n = 1
    rng = np.random.default_rng(9)
    V = [random_polynomial(n, rng) for _ in range(2 * n)]
    F = SuperPoly.c(n, 1) * SuperPoly.from_polyfield(
        random_polynomial(n, rng)
    ) + SuperPoly.c(n, 2) * SuperPoly.from_polyfield(random_polynomial(n, rng))
    Vmap = {a + 1: V[a] for a in range(2 * n)}
    lie = cartan_via_epb(n, "lie", F, Vmap)
    d_iota = cartan_via_epb(n, "d", cartan_via_epb(n, "iota", F, Vmap))
    iota_d = cartan_via_epb(n, "iota", cartan_via_epb(n, "d", F), Vmap)
    assert (lie - d_iota - iota_d).max_abs_coeff() < 1e-10


def test_musical_isomorphisms_round_trip():
    n = 1
    rng = np.random.default_rng(8)
    # flat then sharp on a vector returns the vector
    V = hat_map(
        TensorSpec(
            "multivector", n, 1,
            {(a + 1,): random_polynomial(n, rng) for a in range(2 * n)},
        )
    )
    flat = cartan_via_epb(n, "flat", V)
    back = cartan_via_epb(n, "sharp", flat)
    assert (back - V).max_abs_coeff() < 1e-12


def test_poisson_bracket_of_conjugate_pair():
    n = 1
    q = SuperPoly.from_polyfield(poly_variable(n, ("q", 1)))
    p = poly_variable(n, ("p", 1))
    pb = cartan_via_epb(n, "pb", q, p)
    assert (pb - SuperPoly.constant(n, 1.0)).max_abs_coeff() == 0.0


def test_bracket_suite_all_exact():
    for row in bracket_rows(seed=123):
        assert row["residual"] < 1e-12, row


def test_superfield_identity_random_hamiltonians():
    rng = np.random.default_rng(77)
    for _ in range(5):
        H = random_polynomial(1, rng, max_degree=3)
        parts = superfield_expand(H)
        assert (parts["script_H"] - script_h(H)).max_abs_coeff() < 1e-12


def test_berezin_orientation():
    n = 1
    th = SuperPoly.theta(n)
    thb = SuperPoly.thetabar(n)
    assert (berezin_integral(th * thb)
            - SuperPoly.constant(n, -1.0)).max_abs_coeff() == 0.0
    assert (berezin_integral(thb * th)
            - SuperPoly.constant(n, 1.0)).max_abs_coeff() == 0.0


def test_vector_valued_zero_form_brackets():
    rng = np.random.default_rng(21)
    n = 1
    V = [random_polynomial(n, rng) for _ in range(2 * n)]
    W = [random_polynomial(n, rng) for _ in range(2 * n)]
    J = TensorSpec("vvform", n, 0, {(a + 1, ()): V[a] for a in range(2 * n)})
    L = TensorSpec("vvform", n, 0, {(a + 1, ()): W[a] for a in range(2 * n)})
    # algebraic bracket has nothing to act on for plain vectors
    assert nr_bracket(J, L).max_abs_coeff() == 0.0
    # differential bracket reduces to the Lie bracket
    lie = [
        sum(
            (V[b] * W[a].diff(b + 1) - W[b] * V[a].diff(b + 1)
             for b in range(2 * n)),
            PolyField(n, {}),
        )
        for a in range(2 * n)
    ]
    lie_hat = hat_map(
        TensorSpec("vvform", n, 0, {(a + 1, ()): lie[a]
                                    for a in range(2 * n)})
    )
    assert (fn_bracket(J, L) - lie_hat).max_abs_coeff() < 1e-12
