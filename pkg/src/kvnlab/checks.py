"""Identity-check suites shared by the command-line runner and the tests.

Each suite returns a list of rows ``{"identity": str, "n": int,
"residual": float, "passed": bool}`` computed against the stated tolerance.
The residuals are exact operator-coefficient norms, not grid estimates.
"""

from __future__ import annotations

import numpy as np

from .graded import (
    GradedDiffOp,
    charge,
    codifferential,
    exterior_derivative,
    graded_commutator,
    hamiltonian_vector_field,
    hodge_star,
    htilde,
    interior_contraction,
    laplacian,
    lie_derivative,
)
from .polyfield import PolyField, poly_variable
from .sector import anticommutator, build_c, build_cbar, sector_dim
from .superpoly import (
    SuperPoly,
    TensorSpec,
    cartan_via_epb,
    epb,
    fn_bracket,
    hat_map,
    nr_bracket,
    script_h,
    sn_bracket,
    superfield_expand,
    un_hat,
)

__all__ = [
    "grassmann_rows",
    "cartan_rows",
    "charge_algebra_rows",
    "bracket_rows",
    "standard_hamiltonians",
    "random_polynomial",
]


def _row(identity: str, n: int, residual: float, tol: float) -> dict:
    return {
        "identity": identity,
        "n": n,
        "residual": float(residual),
        "passed": bool(residual <= tol),
    }


def standard_hamiltonians(n: int = 1) -> dict:
    """The reference one-dof Hamiltonians used across the check suites."""
    p = poly_variable(n, ("p", 1))
    q = poly_variable(n, ("q", 1))
    return {
        "p^2/2": p * p * 0.5,
        "p^2/2+q^2": p * p * 0.5 + q * q,
        "p^2/2+q^3": p * p * 0.5 + q * q * q,
    }


def random_polynomial(n: int, rng, max_degree: int = 2,
                      terms: int = 4) -> PolyField:
    """Random real polynomial on 2n phase-space variables."""
    t = {}
    for _ in range(terms):
        e = tuple(int(x) for x in rng.integers(0, max_degree + 1, 2 * n))
        t[e] = t.get(e, 0.0) + float(rng.standard_normal())
    poly = PolyField(n, t)
    return poly if not poly.is_zero() else PolyField.constant(n, 1.0)


# ---------------------------------------------------------------------------
# Grassmann sector algebra
# ---------------------------------------------------------------------------


def grassmann_rows(n_values=(1, 2, 3), tol: float = 1e-12) -> list:
    """Canonical anticommutators of the sector ladder operators:
    [c^a, c^b]_+ = 0, [cbar_a, cbar_b]_+ = 0, [c^a, cbar_b]_+ = delta^a_b."""
    rows = []
    for n in n_values:
        cs = [build_c(n, a) for a in range(1, 2 * n + 1)]
        cbs = [build_cbar(n, a) for a in range(1, 2 * n + 1)]
        eye = np.eye(sector_dim(n))
        r_cc = r_bb = r_cb = 0.0
        for a in range(2 * n):
            for b in range(2 * n):
                r_cc = max(r_cc, abs(anticommutator(cs[a], cs[b])).max())
                r_bb = max(r_bb, abs(anticommutator(cbs[a], cbs[b])).max())
                target = eye if a == b else 0.0
                r_cb = max(
                    r_cb,
                    abs(anticommutator(cs[a], cbs[b]).toarray() - target).max(),
                )
        rows.append(_row("[c,c]+ = 0", n, r_cc, tol))
        rows.append(_row("[cbar,cbar]+ = 0", n, r_bb, tol))
        rows.append(_row("[c,cbar]+ = delta", n, r_cb, tol))
    return rows


# ---------------------------------------------------------------------------
# Cartan calculus
# ---------------------------------------------------------------------------


def cartan_rows(n: int = 1, tol: float = 1e-12) -> list:
    rows = []
    d = exterior_derivative(n)
    delta = codifferential(n)
    rows.append(_row("d^2 = 0", n, d.compose(d).max_abs_coeff(), tol))
    rows.append(
        _row("delta^2 = 0", n, delta.compose(delta).max_abs_coeff(), tol)
    )
    lap = d.compose(delta) + delta.compose(d)
    target = GradedDiffOp.zero(n)
    for a in range(1, 2 * n + 1):
        e = [0] * (2 * n)
        e[a - 1] = 2
        target = target + GradedDiffOp.from_sector(
            n, -np.eye(sector_dim(n)), deriv=tuple(e)
        )
    rows.append(
        _row("d delta + delta d = -sum d_a^2", n,
             (lap - target).max_abs_coeff(), tol)
    )
    rows.append(
        _row("laplacian helper agrees", n,
             (lap - laplacian(n)).max_abs_coeff(), tol)
    )
    star = np.asarray(hodge_star(n), dtype=complex)
    from .sector import basis_degrees

    deg = basis_degrees(n)
    want = np.diag([(-1.0) ** (d * (2 * n - d)) for d in deg])
    res = np.max(np.abs(star @ star - want))
    rows.append(_row("star star = (-1)^{p(2n-p)}", n, res, tol))
    for name, H in standard_hamiltonians(n).items():
        h = {a + 1: c for a, c in enumerate(hamiltonian_vector_field(H))}
        di = exterior_derivative(n).compose(interior_contraction(n, h))
        idd = interior_contraction(n, h).compose(exterior_derivative(n))
        res = (lie_derivative(H) - (di + idd)).max_abs_coeff()
        rows.append(_row(f"L_h = d i_h + i_h d  (H={name})", n, res, tol))
        res = (htilde(H) - lie_derivative(H) * (-1j)).max_abs_coeff()
        rows.append(_row(f"evolution op = -i L_h  (H={name})", n, res, tol))
    return rows


# ---------------------------------------------------------------------------
# charge algebra
# ---------------------------------------------------------------------------


_CHARGE_RELATIONS = (
    # (A, B, grading, combination target)
    ("Qf", "Q", "-", ("Q", 1.0)),
    ("Qf", "Qbar", "-", ("Qbar", -1.0)),
    ("Qf", "K", "-", ("K", 2.0)),
    ("Qf", "Kbar", "-", ("Kbar", -2.0)),
    ("K", "Kbar", "-", ("Qf-n", 1.0)),
    ("K", "Q", "-", (None, 0.0)),
    ("K", "Qbar", "-", ("Q", 1.0)),
    ("Kbar", "Q", "-", ("Qbar", 1.0)),
    ("Kbar", "Qbar", "-", (None, 0.0)),
    ("Q", "Q", "+", (None, 0.0)),
    ("Qbar", "Qbar", "+", (None, 0.0)),
    ("Q", "Qbar", "+", (None, 0.0)),
)


def charge_algebra_rows(n: int = 1, beta: float = 0.7,
                        tol: float = 1e-12) -> list:
    rows = []
    ops = {
        name: charge(n, name)
        for name in ("Q", "Qbar", "K", "Kbar", "Qf")
    }
    for A, B, grading, (tname, fac) in _CHARGE_RELATIONS:
        lhs = graded_commutator(ops[A], ops[B], grading)
        if tname is None:
            target = GradedDiffOp.zero(n)
        elif tname == "Qf-n":
            target = ops["Qf"] + GradedDiffOp.from_sector(
                n, -n * np.eye(sector_dim(n))
            )
            target = target * fac if fac != 1.0 else target
        else:
            target = ops[tname] * fac
        res = (lhs - target).max_abs_coeff()
        sym = "+" if grading == "+" else "-"
        rows.append(_row(f"[{A},{B}]_{sym} relation", n, res, tol))
    for name, H in list(standard_hamiltonians(n).items())[:2]:
        QH = charge(n, "QH", H=H, beta=beta)
        QHbar = charge(n, "QHbar", H=H, beta=beta)
        lhs = graded_commutator(QH, QHbar, "+")
        res = (lhs - htilde(H) * (2j * beta)).max_abs_coeff()
        rows.append(
            _row(f"[Q_H,Qbar_H]+ = 2i beta Htilde  (H={name})", n, res, tol)
        )
    return rows


# ---------------------------------------------------------------------------
# generalized brackets and the superfield identity
# ---------------------------------------------------------------------------


def _lie_bracket(n: int, V: list, W: list) -> list:
    out = []
    for a in range(2 * n):
        acc = PolyField(n, {})
        for b in range(2 * n):
            acc = acc + V[b] * W[a].diff(b + 1) - W[b] * V[a].diff(b + 1)
        out.append(acc)
    return out


def bracket_rows(seed: int = 0, n: int = 1, tol: float = 1e-12) -> list:
    rng = np.random.default_rng(seed)
    rows = []
    for trial in range(3):
        V = [random_polynomial(n, rng) for _ in range(2 * n)]
        W = [random_polynomial(n, rng) for _ in range(2 * n)]
        P = TensorSpec("multivector", n, 1,
                       {(a + 1,): V[a] for a in range(2 * n)})
        R = TensorSpec("multivector", n, 1,
                       {(a + 1,): W[a] for a in range(2 * n)})
        lie_hat = hat_map(
            TensorSpec("multivector", n, 1,
                       {(a + 1,): c
                        for a, c in enumerate(_lie_bracket(n, V, W))})
        )
        res = (sn_bracket(P, R) - lie_hat).max_abs_coeff()
        rows.append(_row(f"SN = Lie on vectors (pair {trial + 1})", n, res, tol))
    V = [random_polynomial(n, rng) for _ in range(2 * n)]
    W = [random_polynomial(n, rng) for _ in range(2 * n)]
    J = TensorSpec("vvform", n, 0, {(a + 1, ()): V[a] for a in range(2 * n)})
    L = TensorSpec("vvform", n, 0, {(a + 1, ()): W[a] for a in range(2 * n)})
    lie_vv = hat_map(
        TensorSpec("vvform", n, 0,
                   {(a + 1, ()): c
                    for a, c in enumerate(_lie_bracket(n, V, W))})
    )
    rows.append(
        _row("FN = Lie on vv zero-forms", n,
             (fn_bracket(J, L) - lie_vv).max_abs_coeff(), tol)
    )
    nr = nr_bracket(J, L)
    res = (nr - epb(hat_map(J), hat_map(L)) * 1j).max_abs_coeff()
    rows.append(_row("NR = i{J^, L^} by construction", n, res, tol))
    rows.append(
        _row("NR vanishes on vv zero-forms (algebraic bracket)", n,
             nr.max_abs_coeff(), tol)
    )
    rt = un_hat(hat_map(J), "vvform", 0)
    res = max(
        ((rt.comps.get(k, PolyField(n, {})) - J.comps[k]).max_abs_coeff()
         for k in J.comps),
        default=0.0,
    )
    if set(rt.comps) != set(J.comps):
        res = max(res, 1.0)
    rows.append(_row("hat / un-hat round trip", n, res, tol))
    for trial in range(5):
        H = random_polynomial(n, rng, max_degree=3)
        res = (superfield_expand(H)["script_H"] - script_h(H)).max_abs_coeff()
        rows.append(
            _row(f"i int dtheta dthetabar H[Phi] = script-H (trial {trial + 1})",
                 n, res, tol)
        )
    q = poly_variable(n, ("q", 1))
    p = poly_variable(n, ("p", 1))
    pb = cartan_via_epb(n, "pb", SuperPoly.from_polyfield(q), p)
    rows.append(
        _row("pb(q, p) = 1", n,
             (pb - SuperPoly.constant(n, 1.0)).max_abs_coeff(), tol)
    )
    return rows
