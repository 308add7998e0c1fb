"""Exterior-calculus operators as exact graded differential operators.

A :class:`GradedDiffOp` is a finite sum of terms

    (sector matrix with polynomial entries)  x  (derivative multi-index)

acting on multiform fields: vectors of length 4**n whose components are
polynomials (or grid fields) over phase space.  Composition applies the
Leibniz rule exactly on the polynomial entries, so operator identities such
as d^2 = 0 or L_h = d i_h + i_h d can be verified symbolically.

Built here: the exterior derivative d, interior contraction i_V, Lie
derivative along the Hamiltonian flow, Hodge star, codifferential, Laplacian,
the canonical symmetry charges of the operatorial theory, and the
sqrt(h)-parameterized irreducible 4x4 charge representation.
"""

from __future__ import annotations

from itertools import product as _iproduct
from math import comb
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .polyfield import PolyField
from .sector import (
    build_c,
    build_cbar,
    internal_index,
    omega_lower,
    omega_upper,
    sector_dim,
    _mask_slots,
)

__all__ = [
    "GradedDiffOp",
    "exterior_derivative",
    "interior_contraction",
    "hamiltonian_vector_field",
    "lie_derivative",
    "htilde",
    "liouvillian",
    "hodge_star",
    "codifferential",
    "laplacian",
    "charge",
    "graded_commutator",
    "irrep_matrices",
    "CHARGE_NAMES",
]

CHARGE_NAMES = ("Q", "Qbar", "K", "Kbar", "Qf", "N", "Nbar", "QH", "QHbar")

_MatDict = dict  # {(i, j): PolyField}


def _mat_from_sparse(n: int, A, coeff: PolyField | None = None) -> _MatDict:
    A = sp.coo_matrix(A)
    out: _MatDict = {}
    for i, j, v in zip(A.row, A.col, A.data):
        if v == 0:
            continue
        poly = PolyField.constant(n, v) if coeff is None else coeff * v
        _mat_add(out, (int(i), int(j)), poly)
    return out


def _mat_add(m: _MatDict, key, poly: PolyField) -> None:
    cur = m.get(key)
    poly = poly if cur is None else cur + poly
    if poly.is_zero():
        m.pop(key, None)
    else:
        m[key] = poly


def _mat_mul(m1: _MatDict, m2: _MatDict) -> _MatDict:
    by_row: dict[int, list] = {}
    for (k, j), poly in m2.items():
        by_row.setdefault(k, []).append((j, poly))
    out: _MatDict = {}
    for (i, k), p1 in m1.items():
        for j, p2 in by_row.get(k, ()):  # noqa: B905
            _mat_add(out, (i, j), p1 * p2)
    return out


def _mat_diff(n: int, m: _MatDict, alpha: tuple) -> _MatDict:
    out: _MatDict = {}
    for key, poly in m.items():
        for slot, k in enumerate(alpha, start=1):
            for _ in range(k):
                poly = poly.diff(slot)
        if not poly.is_zero():
            out[key] = poly
    return out


def _multi_binom(d: tuple, a: tuple) -> int:
    b = 1
    for dk, ak in zip(d, a):
        b *= comb(dk, ak)
    return b


def _sub_multi_indices(d: tuple):
    ranges = [range(k + 1) for k in d]
    for alpha in _iproduct(*ranges):
        yield tuple(alpha)


class GradedDiffOp:
    """Sum of (polynomial sector matrix) x (phase-space derivative) terms."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple, _MatDict] | None = None):
        object.__setattr__(self, "n", int(n))
        clean: dict[tuple, _MatDict] = {}
        if terms:
            for deriv, mat in terms.items():
                deriv = tuple(int(k) for k in deriv)
                if len(deriv) != 2 * self.n or any(k < 0 for k in deriv):
                    raise ValueError(f"bad derivative multi-index {deriv}")
                m = {k: p for k, p in mat.items() if not p.is_zero()}
                if m:
                    clean[deriv] = m
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("GradedDiffOp is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(n: int) -> "GradedDiffOp":
        return GradedDiffOp(n)

    @staticmethod
    def from_sector(n: int, A, coeff: PolyField | None = None,
                    deriv: tuple | None = None) -> "GradedDiffOp":
        """Single term: sector matrix A times coefficient times derivative."""
        d = tuple([0] * (2 * n)) if deriv is None else tuple(deriv)
        return GradedDiffOp(n, {d: _mat_from_sparse(n, A, coeff)})

    @staticmethod
    def multiplication(n: int, poly: PolyField) -> "GradedDiffOp":
        """Scalar multiplication operator poly * identity."""
        return GradedDiffOp.from_sector(n, sp.identity(sector_dim(n)), poly)

    @staticmethod
    def derivative(n: int, a, order: int = 1) -> "GradedDiffOp":
        slot = internal_index(n, a)
        d = [0] * (2 * n)
        d[slot - 1] = order
        return GradedDiffOp.from_sector(
            n, sp.identity(sector_dim(n)), deriv=tuple(d)
        )

    # -- algebra ------------------------------------------------------
    def _check(self, other: "GradedDiffOp") -> None:
        if self.n != other.n:
            raise ValueError("GradedDiffOp arity mismatch")

    def __add__(self, other: "GradedDiffOp") -> "GradedDiffOp":
        self._check(other)
        out = {d: dict(m) for d, m in self.terms.items()}
        for d, m in other.terms.items():
            tgt = out.setdefault(d, {})
            for key, poly in m.items():
                _mat_add(tgt, key, poly)
        return GradedDiffOp(self.n, out)

    def __neg__(self) -> "GradedDiffOp":
        return self * (-1)

    def __sub__(self, other: "GradedDiffOp") -> "GradedDiffOp":
        return self + (-other)

    def __mul__(self, scalar) -> "GradedDiffOp":
        if isinstance(scalar, GradedDiffOp):
            return self.compose(scalar)
        return GradedDiffOp(
            self.n,
            {
                d: {k: p * scalar for k, p in m.items()}
                for d, m in self.terms.items()
            },
        )

    def __rmul__(self, scalar) -> "GradedDiffOp":
        if isinstance(scalar, GradedDiffOp):
            return scalar.compose(self)
        return self * scalar

    def compose(self, other: "GradedDiffOp") -> "GradedDiffOp":
        """Operator product self o other with exact Leibniz expansion."""
        self._check(other)
        out: dict[tuple, _MatDict] = {}
        for d1, m1 in self.terms.items():
            for d2, m2 in other.terms.items():
                for alpha in _sub_multi_indices(d1):
                    coeff = _multi_binom(d1, alpha)
                    m2d = _mat_diff(self.n, m2, alpha)
                    if not m2d:
                        continue
                    prod = _mat_mul(m1, m2d)
                    if not prod:
                        continue
                    deriv = tuple(
                        a - b + c for a, b, c in zip(d1, alpha, d2)
                    )
                    tgt = out.setdefault(deriv, {})
                    for key, poly in prod.items():
                        _mat_add(tgt, key, poly * coeff)
        return GradedDiffOp(self.n, out)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        best = 0.0
        for m in self.terms.values():
            for poly in m.values():
                best = max(best, poly.max_abs_coeff())
        return best

    def __eq__(self, other):
        return (
            isinstance(other, GradedDiffOp)
            and (self - other).is_zero()
        )

    def __hash__(self):
        raise TypeError("unhashable")

    # -- action -------------------------------------------------------
    def apply_poly(self, components: list[PolyField]) -> list[PolyField]:
        """Act on a multiform with polynomial components (length 4**n)."""
        dim = sector_dim(self.n)
        if len(components) != dim:
            raise ValueError("component count mismatch")
        out = [PolyField.constant(self.n, 0.0) for _ in range(dim)]
        for deriv, m in self.terms.items():
            for (i, j), poly in m.items():
                comp = components[j]
                for slot, k in enumerate(deriv, start=1):
                    for _ in range(k):
                        comp = comp.diff(slot)
                if not comp.is_zero():
                    out[i] = out[i] + poly * comp
        return out

    def conjugate(self) -> "GradedDiffOp":
        """Entrywise complex conjugation of the polynomial sector matrix."""
        return GradedDiffOp(
            self.n,
            {
                d: {k: p.conjugate() for k, p in m.items()}
                for d, m in self.terms.items()
            },
        )

    def sector_transpose(self) -> "GradedDiffOp":
        """Transpose the sector indices (leaves derivatives untouched)."""
        return GradedDiffOp(
            self.n,
            {
                d: {(j, i): p for (i, j), p in m.items()}
                for d, m in self.terms.items()
            },
        )


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def exterior_derivative(n: int) -> GradedDiffOp:
    """d = sum_a c^a d/dphi^a; raises form degree by one, d o d = 0."""
    op = GradedDiffOp.zero(n)
    for a in range(1, 2 * n + 1):
        d = [0] * (2 * n)
        d[a - 1] = 1
        op = op + GradedDiffOp.from_sector(n, build_c(n, a), deriv=tuple(d))
    return op


def interior_contraction(n: int, V) -> GradedDiffOp:
    """i_V = sum_a V^a cbar_a for a vector field with components V.

    ``V`` maps slot labels to PolyField (or is a sequence in the public
    ordering q1, p1, q2, p2, ...).
    """
    comps = _vector_components(n, V)
    op = GradedDiffOp.zero(n)
    for a in range(1, 2 * n + 1):
        poly = comps[a - 1]
        if poly.is_zero():
            continue
        op = op + GradedDiffOp.from_sector(n, build_cbar(n, a), poly)
    return op


def _vector_components(n: int, V) -> list[PolyField]:
    """Vector-field components indexed by internal slot (0-based list)."""
    if isinstance(V, dict):
        comps = [PolyField.constant(n, 0.0) for _ in range(2 * n)]
        for key, poly in V.items():
            comps[internal_index(n, key) - 1] = poly
        return comps
    V = list(V)
    if len(V) != 2 * n:
        raise ValueError(f"expected {2 * n} components, got {len(V)}")
    comps = [PolyField.constant(n, 0.0) for _ in range(2 * n)]
    public = []
    for i in range(1, n + 1):
        public.append(("q", i))
        public.append(("p", i))
    for label, poly in zip(public, V):
        if isinstance(poly, (int, float, complex)):
            poly = PolyField.constant(n, poly)
        comps[internal_index(n, label) - 1] = poly
    return comps


def hamiltonian_vector_field(H: PolyField) -> list[PolyField]:
    """Components omega^{ab} dH/dphi^b, indexed by internal slot (0-based)."""
    n = H.n
    w = omega_upper(n)
    comps = []
    for a in range(2 * n):
        poly = PolyField.constant(n, 0.0)
        for b in range(2 * n):
            if w[a, b]:
                poly = poly + H.diff(b + 1) * w[a, b]
        comps.append(poly)
    return comps


def _iota_h(H: PolyField) -> GradedDiffOp:
    n = H.n
    comps = hamiltonian_vector_field(H)
    op = GradedDiffOp.zero(n)
    for a in range(1, 2 * n + 1):
        if not comps[a - 1].is_zero():
            op = op + GradedDiffOp.from_sector(
                n, build_cbar(n, a), comps[a - 1]
            )
    return op


def lie_derivative(H: PolyField) -> GradedDiffOp:
    """Lie derivative along the Hamiltonian flow: L_h = d i_h + i_h d."""
    n = H.n
    d = exterior_derivative(n)
    ih = _iota_h(H)
    return d.compose(ih) + ih.compose(d)


def htilde(H: PolyField) -> GradedDiffOp:
    """Multiform evolution operator; equals -i L_h.

    htilde = -i omega^{ab} dH/dphi^b d/dphi^a
             + i omega^{ab} (d^2 H/dphi^b dphi^d) cbar_a c^d
    """
    n = H.n
    w = omega_upper(n)
    op = GradedDiffOp.zero(n)
    comps = hamiltonian_vector_field(H)
    ident = sp.identity(sector_dim(n))
    for a in range(1, 2 * n + 1):
        poly = comps[a - 1] * (-1j)
        if poly.is_zero():
            continue
        d = [0] * (2 * n)
        d[a - 1] = 1
        op = op + GradedDiffOp.from_sector(n, ident, poly, tuple(d))
    for a in range(1, 2 * n + 1):
        cbar_a = build_cbar(n, a)
        for dd in range(1, 2 * n + 1):
            poly = PolyField.constant(n, 0.0)
            for b in range(2 * n):
                if w[a - 1, b]:
                    poly = poly + H.diff(b + 1).diff(dd) * w[a - 1, b]
            poly = poly * 1j
            if poly.is_zero():
                continue
            sector = (cbar_a @ build_c(n, dd)).tocsr()
            op = op + GradedDiffOp.from_sector(n, sector, poly)
    return op


def htilde_fermionic(H: PolyField) -> GradedDiffOp:
    """Only the form-mixing (fermionic) part of htilde."""
    n = H.n
    bos = liouvillian(H)
    return htilde(H) - bos


def liouvillian(H: PolyField) -> GradedDiffOp:
    """Scalar Liouville operator -i omega^{ab} dH/dphi^b d/dphi^a x identity."""
    n = H.n
    comps = hamiltonian_vector_field(H)
    ident = sp.identity(sector_dim(n))
    op = GradedDiffOp.zero(n)
    for a in range(1, 2 * n + 1):
        poly = comps[a - 1] * (-1j)
        if poly.is_zero():
            continue
        d = [0] * (2 * n)
        d[a - 1] = 1
        op = op + GradedDiffOp.from_sector(n, ident, poly, tuple(d))
    return op


def _perm_sign(seq: tuple, ref: tuple) -> int:
    """Sign of the permutation taking ``ref`` to ``seq``."""
    pos = {v: i for i, v in enumerate(ref)}
    arr = [pos[v] for v in seq]
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign


def hodge_star(n: int) -> np.ndarray:
    """Hodge star on the multiform sector (Euclidean metric).

    Orientation: the positively oriented volume order is
    (q1, p1, q2, p2, ...); on degree-p states (star o star) =
    (-1)^(p(2n-p)).
    """
    dim = sector_dim(n)
    orient = []
    for i in range(1, n + 1):
        orient.append(internal_index(n, ("q", i)))
        orient.append(internal_index(n, ("p", i)))
    orient = tuple(orient)
    M = np.zeros((dim, dim))
    full = (1 << (2 * n)) - 1
    for mask in range(dim):
        slots = _mask_slots(n, mask)
        comp = _mask_slots(n, full ^ mask)
        sign = _perm_sign(slots + comp, orient)
        # column = source basis vector, row = image basis vector
        row = full ^ mask
        M[row, mask] = sign
    return M


def codifferential(n: int) -> GradedDiffOp:
    """delta = -sum_a cbar_a d/dphi^a = -(star d star); lowers degree by one."""
    op = GradedDiffOp.zero(n)
    for a in range(1, 2 * n + 1):
        d = [0] * (2 * n)
        d[a - 1] = 1
        op = op + GradedDiffOp.from_sector(
            n, build_cbar(n, a) * (-1.0), deriv=tuple(d)
        )
    return op


def laplacian(n: int) -> GradedDiffOp:
    """Laplace-de Rham operator d delta + delta d = -sum_a (d/dphi^a)^2."""
    d = exterior_derivative(n)
    dl = codifferential(n)
    return d.compose(dl) + dl.compose(d)


def charge(n: int, name: str, H: PolyField | None = None,
           beta: float | None = None) -> GradedDiffOp:
    """Canonical symmetry charges of the operatorial theory.

    Q (= d), Qbar, Qf (form degree), K, Kbar (degree +-2 ladders),
    N, Nbar (require H), QH = Q - beta N, QHbar = Qbar + beta Nbar
    (require H and beta).
    """
    if name not in CHARGE_NAMES:
        raise ValueError(f"unknown charge {name!r}; one of {CHARGE_NAMES}")
    needs_h = name in ("N", "Nbar", "QH", "QHbar")
    if needs_h and H is None:
        raise ValueError(f"charge {name} requires a Hamiltonian")
    if name in ("QH", "QHbar") and beta is None:
        raise ValueError(f"charge {name} requires beta")
    w_up = omega_upper(n)
    w_lo = omega_lower(n)
    if name == "Q":
        return exterior_derivative(n)
    if name == "Qbar":
        op = GradedDiffOp.zero(n)
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                if w_up[a - 1, b - 1]:
                    d = [0] * (2 * n)
                    d[b - 1] = 1
                    op = op + GradedDiffOp.from_sector(
                        n, build_cbar(n, a) * w_up[a - 1, b - 1],
                        deriv=tuple(d),
                    )
        return op
    if name == "Qf":
        mat = sum(
            (build_c(n, a) @ build_cbar(n, a) for a in range(1, 2 * n + 1)),
            sp.csr_matrix((sector_dim(n), sector_dim(n))),
        )
        return GradedDiffOp.from_sector(n, mat)
    if name == "K":
        mat = sp.csr_matrix((sector_dim(n), sector_dim(n)))
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                if w_lo[a - 1, b - 1]:
                    mat = mat + 0.5 * w_lo[a - 1, b - 1] * (
                        build_c(n, a) @ build_c(n, b)
                    )
        return GradedDiffOp.from_sector(n, mat)
    if name == "Kbar":
        mat = sp.csr_matrix((sector_dim(n), sector_dim(n)))
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                if w_up[a - 1, b - 1]:
                    mat = mat + 0.5 * w_up[a - 1, b - 1] * (
                        build_cbar(n, a) @ build_cbar(n, b)
                    )
        return GradedDiffOp.from_sector(n, mat)
    if name == "N":
        op = GradedDiffOp.zero(n)
        for a in range(1, 2 * n + 1):
            poly = H.diff(a)
            if not poly.is_zero():
                op = op + GradedDiffOp.from_sector(n, build_c(n, a), poly)
        return op
    if name == "Nbar":
        op = GradedDiffOp.zero(n)
        for a in range(1, 2 * n + 1):
            poly = PolyField.constant(n, 0.0)
            for b in range(1, 2 * n + 1):
                if w_up[a - 1, b - 1]:
                    poly = poly + H.diff(b) * w_up[a - 1, b - 1]
            if not poly.is_zero():
                op = op + GradedDiffOp.from_sector(n, build_cbar(n, a), poly)
        return op
    if name == "QH":
        return charge(n, "Q") - charge(n, "N", H) * beta
    # QHbar
    return charge(n, "Qbar") + charge(n, "Nbar", H) * beta


def graded_commutator(A: GradedDiffOp, B: GradedDiffOp,
                      grading: str = "-") -> GradedDiffOp:
    """AB -+ BA: grading "-" is the commutator, "+" the anticommutator."""
    if grading not in ("-", "+"):
        raise ValueError("grading must be '-' or '+'")
    AB = A.compose(B)
    BA = B.compose(A)
    return AB - BA if grading == "-" else AB + BA


def irrep_matrices(h: float) -> dict[str, np.ndarray]:
    """The sqrt(h)-parameterized irreducible 4x4 charge representation.

    Only nonzero anticommutators: [Q, -iNbar]_+ = [Qbar, iN]_+ = h * identity.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    r = np.sqrt(h)
    Z = np.zeros((4, 4))
    Q = Z.copy()
    Q[2, 0] = r
    Q[3, 1] = r
    miNbar = Z.copy()  # -i Nbar
    miNbar[0, 2] = r
    miNbar[1, 3] = r
    Qbar = Z.copy()
    Qbar[0, 1] = r
    Qbar[2, 3] = -r
    iN = Z.copy()
    iN[1, 0] = r
    iN[3, 2] = -r
    H = h * np.eye(4)
    Qf = np.diag([0.0, 1.0, 1.0, 2.0])
    K = Z.copy()
    K[3, 0] = 1.0
    Kbar = Z.copy()
    Kbar[0, 3] = 1.0
    return {
        "Q": Q,
        "Qbar": Qbar,
        "iN": iN,
        "-iNbar": miNbar,
        "H": H,
        "Qf": Qf,
        "K": K,
        "Kbar": Kbar,
    }
