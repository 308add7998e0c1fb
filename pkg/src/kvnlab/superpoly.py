"""Symbolic engine for the extended Poisson bracket over (phi, lambda, c, cbar).

A :class:`SuperPoly` is a polynomial in the commuting symbols phi^a, lambda_a
and the anticommuting symbols c^a, cbar_a (plus the superspace partners theta,
thetabar), stored as a map

    (phi exponents, lambda exponents, ordered fermion word) -> coefficient

with the fermion word kept strictly ascending in a fixed rank order
(theta < thetabar < c^1 < ... < c^{2n} < cbar_1 < ... < cbar_{2n}) and all
reordering signs absorbed into the coefficient.

The extended bracket is fixed by

    {phi^a, lambda_b} = delta^a_b ,   {cbar_b, c^a} = -i delta^a_b ,

extends by graded bilinearity/Leibniz, and realizes the Cartan calculus and
the Schouten-Nijenhuis / Froelicher-Nijenhuis / Nijenhuis-Richardson brackets
through the hat correspondence (forms -> c-words, multivectors -> cbar-words).
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .polyfield import PolyField
from .sector import internal_index, omega_lower, omega_upper

__all__ = [
    "SuperPoly",
    "TensorSpec",
    "epb",
    "hat_map",
    "un_hat",
    "charge_poly",
    "cartan_via_epb",
    "sn_bracket",
    "fn_bracket",
    "nr_bracket",
    "superfield_expand",
    "berezin_integral",
]

_THETA = 0
_THETABAR = 1


def _rank_c(n: int, a: int) -> int:
    return 1 + a


def _rank_cbar(n: int, a: int) -> int:
    return 1 + 2 * n + a


def _merge_words(w1: tuple, w2: tuple):
    """Concatenate two ascending fermion words; returns (sign, word) or None."""
    word = list(w1)
    sign = 1
    for r in w2:
        # insert r into ascending word, counting transpositions
        lo, hi = 0, len(word)
        while lo < hi:
            mid = (lo + hi) // 2
            if word[mid] < r:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(word) and word[lo] == r:
            return None
        if (len(word) - lo) % 2:
            sign = -sign
        word.insert(lo, r)
    return sign, tuple(word)


class SuperPoly:
    """Polynomial over the extended phase-space symbols (immutable)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple, complex] | None = None):
        object.__setattr__(self, "n", int(n))
        clean: dict[tuple, complex] = {}
        if terms:
            for (pe, le, word), coeff in terms.items():
                c = complex(coeff)
                if c == 0:
                    continue
                key = (tuple(pe), tuple(le), tuple(word))
                clean[key] = clean.get(key, 0) + c
                if clean[key] == 0:
                    del clean[key]
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("SuperPoly is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(n: int, value: complex) -> "SuperPoly":
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(z, z, ()): value})

    @staticmethod
    def phi(n: int, a) -> "SuperPoly":
        slot = internal_index(n, a)
        pe = [0] * (2 * n)
        pe[slot - 1] = 1
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(tuple(pe), z, ()): 1.0})

    @staticmethod
    def lam(n: int, a) -> "SuperPoly":
        slot = internal_index(n, a)
        le = [0] * (2 * n)
        le[slot - 1] = 1
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(z, tuple(le), ()): 1.0})

    @staticmethod
    def c(n: int, a) -> "SuperPoly":
        slot = internal_index(n, a)
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(z, z, (_rank_c(n, slot),)): 1.0})

    @staticmethod
    def cbar(n: int, a) -> "SuperPoly":
        slot = internal_index(n, a)
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(z, z, (_rank_cbar(n, slot),)): 1.0})

    @staticmethod
    def theta(n: int) -> "SuperPoly":
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(z, z, (_THETA,)): 1.0})

    @staticmethod
    def thetabar(n: int) -> "SuperPoly":
        z = tuple([0] * (2 * n))
        return SuperPoly(n, {(z, z, (_THETABAR,)): 1.0})

    @staticmethod
    def from_polyfield(poly: PolyField) -> "SuperPoly":
        n = poly.n
        z = tuple([0] * (2 * n))
        return SuperPoly(
            n, {(tuple(e), z, ()): c for e, c in poly.terms.items()}
        )

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = SuperPoly.constant(self.n, other)
        if self.n != other.n:
            raise ValueError("SuperPoly arity mismatch")
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return SuperPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperPoly(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = SuperPoly.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return SuperPoly(
                self.n, {k: c * other for k, c in self.terms.items()}
            )
        if self.n != other.n:
            raise ValueError("SuperPoly arity mismatch")
        out: dict[tuple, complex] = {}
        for (pe1, le1, w1), c1 in self.terms.items():
            for (pe2, le2, w2), c2 in other.terms.items():
                merged = _merge_words(w1, w2)
                if merged is None:
                    continue
                sign, word = merged
                key = (
                    tuple(a + b for a, b in zip(pe1, pe2)),
                    tuple(a + b for a, b in zip(le1, le2)),
                    word,
                )
                out[key] = out.get(key, 0) + sign * c1 * c2
        return SuperPoly(self.n, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = SuperPoly.constant(self.n, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = SuperPoly.constant(self.n, other)
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        raise TypeError("unhashable")

    # -- calculus -----------------------------------------------------
    def dphi(self, a) -> "SuperPoly":
        slot = internal_index(self.n, a)
        out: dict[tuple, complex] = {}
        for (pe, le, w), c in self.terms.items():
            k = pe[slot - 1]
            if k:
                new = list(pe)
                new[slot - 1] = k - 1
                key = (tuple(new), le, w)
                out[key] = out.get(key, 0) + k * c
        return SuperPoly(self.n, out)

    def dlam(self, a) -> "SuperPoly":
        slot = internal_index(self.n, a)
        out: dict[tuple, complex] = {}
        for (pe, le, w), c in self.terms.items():
            k = le[slot - 1]
            if k:
                new = list(le)
                new[slot - 1] = k - 1
                key = (pe, tuple(new), w)
                out[key] = out.get(key, 0) + k * c
        return SuperPoly(self.n, out)

    def _dferm_left(self, rank: int) -> "SuperPoly":
        out: dict[tuple, complex] = {}
        for (pe, le, w), c in self.terms.items():
            if rank in w:
                pos = w.index(rank)
                sign = -1 if pos % 2 else 1
                word = w[:pos] + w[pos + 1:]
                key = (pe, le, word)
                out[key] = out.get(key, 0) + sign * c
        return SuperPoly(self.n, out)

    def dc_left(self, a) -> "SuperPoly":
        return self._dferm_left(_rank_c(self.n, internal_index(self.n, a)))

    def dcbar_left(self, a) -> "SuperPoly":
        return self._dferm_left(_rank_cbar(self.n, internal_index(self.n, a)))

    def parity_part(self, parity: int) -> "SuperPoly":
        return SuperPoly(
            self.n,
            {k: c for k, c in self.terms.items() if len(k[2]) % 2 == parity},
        )

    def fermion_degree_part(self, p: int) -> "SuperPoly":
        """Terms whose fermion word (excluding theta/thetabar) has length p."""
        out = {}
        for (pe, le, w), c in self.terms.items():
            core = [r for r in w if r > _THETABAR]
            if len(core) == p:
                out[(pe, le, w)] = c
        return SuperPoly(self.n, out)

    def __repr__(self):
        if not self.terms:
            return "SuperPoly(0)"
        n = self.n
        names = ["theta", "thetabar"]
        names += [f"c{a}" for a in range(1, 2 * n + 1)]
        names += [f"cb{a}" for a in range(1, 2 * n + 1)]
        bits = []
        for (pe, le, w), c in sorted(self.terms.items()):
            mono = []
            mono += [f"phi{i + 1}^{e}" for i, e in enumerate(pe) if e]
            mono += [f"lam{i + 1}^{e}" for i, e in enumerate(le) if e]
            mono += [names[r] for r in w]
            bits.append(f"({c})" + ("*" + "*".join(mono) if mono else ""))
        return "SuperPoly(" + " + ".join(bits) + ")"


# ---------------------------------------------------------------------------
# extended Poisson bracket
# ---------------------------------------------------------------------------


def epb(F: SuperPoly, G: SuperPoly) -> SuperPoly:
    """Extended Poisson bracket {F, G}.

    Graded bilinear, with {phi^a, lambda_b} = delta^a_b and
    {cbar_b, c^a} = -i delta^a_b; satisfies graded antisymmetry, Leibniz
    and the graded Jacobi identity.
    """
    if F.n != G.n:
        raise ValueError("SuperPoly arity mismatch")
    n = F.n
    out = SuperPoly.constant(n, 0.0)
    for parity in (0, 1):
        Fp = F.parity_part(parity)
        if Fp.is_zero():
            continue
        acc = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            acc = acc + Fp.dphi(a) * G.dlam(a) - Fp.dlam(a) * G.dphi(a)
        ferm = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            ferm = ferm + Fp.dc_left(a) * G.dcbar_left(a)
            ferm = ferm + Fp.dcbar_left(a) * G.dc_left(a)
        sign = 1.0 if parity == 0 else -1.0
        out = out + acc + ferm * (1j * sign)
    return out


# ---------------------------------------------------------------------------
# tensors and the hat correspondence
# ---------------------------------------------------------------------------


class TensorSpec:
    """Antisymmetric tensor on phase space: form, multivector or
    vector-valued form.

    ``comps`` maps a strictly-ascending internal multi-index tuple to a
    :class:`PolyField` coefficient.  For vector-valued forms the key is
    ``(upper, lower)`` with ``upper`` the vector index and ``lower`` the
    ascending form multi-index.
    """

    __slots__ = ("kind", "n", "p", "comps")

    KINDS = ("form", "multivector", "vvform")

    def __init__(self, kind: str, n: int, p: int, comps: Mapping):
        if kind not in self.KINDS:
            raise ValueError(f"kind must be one of {self.KINDS}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "p", int(p))
        clean = {}
        for key, poly in comps.items():
            if isinstance(poly, (int, float, complex)):
                poly = PolyField.constant(n, poly)
            if poly.is_zero():
                continue
            if kind == "vvform":
                upper, lower = key
                upper = internal_index(n, upper)
                lower = tuple(internal_index(n, x) for x in lower)
                if list(lower) != sorted(set(lower)):
                    raise ValueError(
                        f"lower multi-index {lower} must be strictly ascending"
                    )
                if len(lower) != p:
                    raise ValueError("multi-index length mismatch")
                k = (upper, lower)
            else:
                idx = tuple(internal_index(n, x) for x in key)
                if list(idx) != sorted(set(idx)):
                    raise ValueError(
                        f"multi-index {idx} must be strictly ascending"
                    )
                if len(idx) != p:
                    raise ValueError("multi-index length mismatch")
                k = idx
            if k in clean:
                clean[k] = clean[k] + poly
            else:
                clean[k] = poly
        object.__setattr__(self, "comps", clean)

    def __setattr__(self, *a):
        raise AttributeError("TensorSpec is immutable")


def hat_map(T: TensorSpec) -> SuperPoly:
    """Map a tensor to its Grassmann polynomial image.

    Forms become c-words, multivectors cbar-words, vector-valued forms
    (c-word) * (single cbar); coefficients of sorted multi-indices carry no
    extra combinatorial factor.
    """
    n = T.n
    out = SuperPoly.constant(n, 0.0)
    if T.kind == "form":
        for idx, poly in T.comps.items():
            word = SuperPoly.constant(n, 1.0)
            for a in idx:
                word = word * SuperPoly.c(n, a)
            out = out + SuperPoly.from_polyfield(poly) * word
    elif T.kind == "multivector":
        for idx, poly in T.comps.items():
            word = SuperPoly.constant(n, 1.0)
            for a in idx:
                word = word * SuperPoly.cbar(n, a)
            out = out + SuperPoly.from_polyfield(poly) * word
    else:  # vvform
        for (upper, lower), poly in T.comps.items():
            word = SuperPoly.constant(n, 1.0)
            for a in lower:
                word = word * SuperPoly.c(n, a)
            word = word * SuperPoly.cbar(n, upper)
            out = out + SuperPoly.from_polyfield(poly) * word
    return out


def un_hat(S: SuperPoly, kind: str, p: int) -> TensorSpec:
    """Inverse of :func:`hat_map` on its image (raises off-image)."""
    n = S.n
    comps: dict = {}
    lo_c, hi_c = _rank_c(n, 1), _rank_c(n, 2 * n)
    for (pe, le, w), coeff in S.terms.items():
        if any(le) or any(r <= _THETABAR for r in w):
            raise ValueError("not in the image of the hat map")
        cpart = tuple(r - 1 for r in w if lo_c <= r <= hi_c)
        cbpart = tuple(r - 1 - 2 * n for r in w if r > hi_c)
        poly = PolyField(n, {tuple(pe): coeff})
        if kind == "form":
            if cbpart or len(cpart) != p:
                raise ValueError("not a degree-p form image")
            key = cpart
        elif kind == "multivector":
            if cpart or len(cbpart) != p:
                raise ValueError("not a rank-p multivector image")
            key = cbpart
        elif kind == "vvform":
            if len(cbpart) != 1 or len(cpart) != p:
                raise ValueError("not a vector-valued form image")
            key = (cbpart[0], cpart)
        else:
            raise ValueError(f"unknown kind {kind!r}")
        if key in comps:
            comps[key] = comps[key] + poly
        else:
            comps[key] = poly
    return TensorSpec(kind, n, p, comps)


# ---------------------------------------------------------------------------
# charges and Cartan operations through the bracket
# ---------------------------------------------------------------------------


def charge_poly(n: int, name: str, H: PolyField | None = None,
                beta: float | None = None) -> SuperPoly:
    """Symmetry charges as extended-phase-space polynomials."""
    w_up = omega_upper(n)
    w_lo = omega_lower(n)
    if name == "Q":
        out = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            out = out + SuperPoly.c(n, a) * SuperPoly.lam(n, a) * 1j
        return out
    if name == "Qbar":
        out = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                if w_up[a - 1, b - 1]:
                    out = out + (
                        SuperPoly.cbar(n, a) * SuperPoly.lam(n, b)
                        * (1j * w_up[a - 1, b - 1])
                    )
        return out
    if name == "Qf":
        out = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            out = out + SuperPoly.c(n, a) * SuperPoly.cbar(n, a)
        return out
    if name == "K":
        out = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                if w_lo[a - 1, b - 1]:
                    out = out + (
                        SuperPoly.c(n, a) * SuperPoly.c(n, b)
                        * (0.5 * w_lo[a - 1, b - 1])
                    )
        return out
    if name == "Kbar":
        out = SuperPoly.constant(n, 0.0)
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                if w_up[a - 1, b - 1]:
                    out = out + (
                        SuperPoly.cbar(n, a) * SuperPoly.cbar(n, b)
                        * (0.5 * w_up[a - 1, b - 1])
                    )
        return out
    if name == "H":
        if H is None:
            raise ValueError("charge 'H' requires a Hamiltonian")
        return script_h(H)
    raise ValueError(f"unknown charge {name!r}")


def script_h(H: PolyField) -> SuperPoly:
    """Extended Hamiltonian lam_a omega^{ab} dH/dphi^b
    + i cbar_a omega^{ad} (d2H/dphi^d dphi^b) c^b."""
    n = H.n
    w = omega_upper(n)
    out = SuperPoly.constant(n, 0.0)
    for a in range(1, 2 * n + 1):
        for b in range(1, 2 * n + 1):
            if not w[a - 1, b - 1]:
                continue
            out = out + (
                SuperPoly.lam(n, a)
                * SuperPoly.from_polyfield(H.diff(b))
                * w[a - 1, b - 1]
            )
            for d in range(1, 2 * n + 1):
                poly = H.diff(b).diff(d)
                if poly.is_zero():
                    continue
                out = out + (
                    SuperPoly.cbar(n, a)
                    * SuperPoly.from_polyfield(poly)
                    * SuperPoly.c(n, d)
                    * (1j * w[a - 1, b - 1])
                )
    return out


def lie_generator(n: int, V) -> SuperPoly:
    """Generator of the Lie derivative along a vector field:
    lam_a V^a + i cbar_a (dV^a/dphi^b) c^b."""
    from .graded import _vector_components

    comps = _vector_components(n, V)
    out = SuperPoly.constant(n, 0.0)
    for a in range(1, 2 * n + 1):
        Va = comps[a - 1]
        if Va.is_zero():
            continue
        out = out + SuperPoly.lam(n, a) * SuperPoly.from_polyfield(Va)
        for b in range(1, 2 * n + 1):
            dV = Va.diff(b)
            if not dV.is_zero():
                out = out + (
                    SuperPoly.cbar(n, a)
                    * SuperPoly.from_polyfield(dV)
                    * SuperPoly.c(n, b)
                    * 1j
                )
    return out


def cartan_via_epb(n: int, op, arg: SuperPoly, aux=None) -> SuperPoly:
    """Cartan operations realized as extended brackets.

    op: "d" | "iota" | "lie" | "flat" | "sharp" | "pb"
    aux: vector field for iota/lie (component list or dict), second scalar
    for pb.
    """
    if op == "d":
        return epb(charge_poly(n, "Q"), arg) * 1j
    if op == "iota":
        if aux is None:
            raise ValueError("iota requires a vector field")
        vhat = hat_map(
            TensorSpec(
                "multivector", n, 1,
                {
                    (a,): poly
                    for a, poly in enumerate(
                        _components_for(n, aux), start=1
                    )
                },
            )
        )
        return epb(vhat, arg) * 1j
    if op == "lie":
        if aux is None:
            raise ValueError("lie requires a vector field")
        return epb(-lie_generator(n, aux), arg)
    if op == "flat":
        return epb(charge_poly(n, "K"), arg) * 1j
    if op == "sharp":
        return epb(charge_poly(n, "Kbar"), arg) * 1j
    if op == "pb":
        if aux is None:
            raise ValueError("pb requires a second scalar")
        g = aux if isinstance(aux, SuperPoly) else SuperPoly.from_polyfield(aux)
        return epb(
            epb(arg, charge_poly(n, "Q")),
            epb(charge_poly(n, "Qbar"), g),
        ) * 1j
    raise ValueError(f"unknown Cartan operation {op!r}")


def _components_for(n: int, V) -> list[PolyField]:
    from .graded import _vector_components

    return _vector_components(n, V)


# ---------------------------------------------------------------------------
# generalized brackets
# ---------------------------------------------------------------------------


def sn_bracket(P: TensorSpec, R: TensorSpec) -> SuperPoly:
    """Schouten-Nijenhuis bracket of two multivectors: -{{Q, P^}, R^}."""
    if P.kind != "multivector" or R.kind != "multivector":
        raise ValueError("SN bracket takes two multivectors")
    n = P.n
    Q = charge_poly(n, "Q")
    return -epb(epb(Q, hat_map(P)), hat_map(R))


def fn_bracket(J: TensorSpec, L: TensorSpec) -> SuperPoly:
    """Froelicher-Nijenhuis bracket of vector-valued forms: -{{J^, Q}, L^}."""
    if J.kind != "vvform" or L.kind != "vvform":
        raise ValueError("FN bracket takes two vector-valued forms")
    n = J.n
    Q = charge_poly(n, "Q")
    hJ = epb(hat_map(J), Q)
    return -epb(hJ, hat_map(L))


def nr_bracket(J: TensorSpec, L: TensorSpec) -> SuperPoly:
    """Nijenhuis-Richardson bracket of vector-valued forms: i{J^, L^}."""
    if J.kind != "vvform" or L.kind != "vvform":
        raise ValueError("NR bracket takes two vector-valued forms")
    return epb(hat_map(J), hat_map(L)) * 1j


# ---------------------------------------------------------------------------
# superfields
# ---------------------------------------------------------------------------


def superfield(n: int, a) -> SuperPoly:
    """Phi^a = phi^a + theta c^a + thetabar omega^{ab} cbar_b
    + i thetabar theta omega^{ab} lambda_b."""
    slot = internal_index(n, a)
    w = omega_upper(n)
    th = SuperPoly.theta(n)
    thb = SuperPoly.thetabar(n)
    out = SuperPoly.phi(n, slot) + th * SuperPoly.c(n, slot)
    for b in range(1, 2 * n + 1):
        if w[slot - 1, b - 1]:
            out = out + thb * SuperPoly.cbar(n, b) * w[slot - 1, b - 1]
            out = out + (
                thb * th * SuperPoly.lam(n, b) * (1j * w[slot - 1, b - 1])
            )
    return out


def berezin_integral(F: SuperPoly) -> SuperPoly:
    """Integral over the superspace partners: d theta d thetabar, with the
    thetabar integration innermost and int dtheta theta = int dthetabar
    thetabar = 1."""
    return F._dferm_left(_THETABAR)._dferm_left(_THETA)


def superfield_expand(H: PolyField):
    """Expand a Hamiltonian over the superfield substitution.

    Returns a dict with keys "H" (the scalar part), "N", "Nbar" (the
    supersymmetry partners) and "script_H" (the extended Hamiltonian,
    equal to i * berezin_integral(H[Phi]))."""
    n = H.n
    fields = [superfield(n, a) for a in range(1, 2 * n + 1)]
    total = SuperPoly.constant(n, 0.0)
    for exp, coeff in H.terms.items():
        mono = SuperPoly.constant(n, coeff)
        for slot, e in enumerate(exp):
            for _ in range(e):
                mono = mono * fields[slot]
        total = total + mono
    th = SuperPoly.theta(n)
    thb = SuperPoly.thetabar(n)
    no_theta = SuperPoly(
        n,
        {
            k: c
            for k, c in total.terms.items()
            if _THETA not in k[2] and _THETABAR not in k[2]
        },
    )
    N = total._dferm_left(_THETA)
    N = SuperPoly(
        n, {k: c for k, c in N.terms.items() if _THETABAR not in k[2]}
    )
    coeff_thb = total._dferm_left(_THETABAR)
    coeff_thb = SuperPoly(
        n, {k: c for k, c in coeff_thb.terms.items() if _THETA not in k[2]}
    )
    return {
        "H": no_theta,
        "N": N,
        "Nbar": -coeff_thb,
        "script_H": berezin_integral(total) * 1j,
    }
