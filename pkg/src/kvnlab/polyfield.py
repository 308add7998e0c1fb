"""Exact polynomial coefficient fields on phase space.

A :class:`PolyField` is a polynomial in the 2n phase-space variables with
complex coefficients, stored as a map from exponent tuples (internal slot
order: p1, q1, p2, q2, ...) to coefficients.  Arithmetic is exact up to
floating-point rounding of the coefficients, which is what the symbolic
operator algebra needs for closed-form commutators.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .sector import internal_index

__all__ = ["PolyField", "poly_constant", "poly_variable", "poly_from_dict"]

_TOL = 0.0  # exact canonicalization: drop only true zeros


class PolyField:
    """Polynomial in phi^1..phi^{2n} with complex coefficients (immutable)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple, complex] | None = None):
        object.__setattr__(self, "n", int(n))
        clean: dict[tuple, complex] = {}
        if terms:
            for exp, coeff in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != 2 * self.n or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent tuple {exp} for n={n}")
                c = complex(coeff)
                if c != 0:
                    clean[exp] = clean.get(exp, 0) + c
                    if clean[exp] == 0:
                        del clean[exp]
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):  # immutability guard
        raise AttributeError("PolyField is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(n: int, value: complex) -> "PolyField":
        return PolyField(n, {tuple([0] * (2 * n)): value} if value else {})

    @staticmethod
    def variable(n: int, a) -> "PolyField":
        slot = internal_index(n, a)
        exp = [0] * (2 * n)
        exp[slot - 1] = 1
        return PolyField(n, {tuple(exp): 1.0})

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic ---------------------------------------------------
    def _binop_check(self, other: "PolyField") -> None:
        if self.n != other.n:
            raise ValueError("PolyField arity mismatch")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PolyField.constant(self.n, other)
        self._binop_check(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, 0) + c
        return PolyField(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyField(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PolyField.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return PolyField(
                self.n, {e: c * other for e, c in self.terms.items()}
            )
        self._binop_check(other)
        out: dict[tuple, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                out[exp] = out.get(exp, 0) + c1 * c2
        return PolyField(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = PolyField.constant(self.n, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = PolyField.constant(self.n, other)
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------
    def diff(self, a) -> "PolyField":
        """Partial derivative with respect to phi^a."""
        slot = internal_index(self.n, a)
        out: dict[tuple, complex] = {}
        for exp, c in self.terms.items():
            k = exp[slot - 1]
            if k > 0:
                new = list(exp)
                new[slot - 1] = k - 1
                key = tuple(new)
                out[key] = out.get(key, 0) + k * c
        return PolyField(self.n, out)

    def conjugate(self) -> "PolyField":
        """Complex-conjugate coefficients (phase-space variables are real)."""
        return PolyField(
            self.n, {e: np.conj(c) for e, c in self.terms.items()}
        )

    def __call__(self, point) -> complex:
        """Evaluate at a point given in internal slot order (length 2n)."""
        point = np.asarray(point, dtype=complex)
        if point.shape[-1] != 2 * self.n:
            raise ValueError("point arity mismatch")
        total = 0.0 + 0.0j
        for exp, c in self.terms.items():
            mono = c
            for x, e in zip(point, exp):
                if e:
                    mono = mono * x**e
            total += mono
        return total

    def eval_grid(self, arrays) -> np.ndarray:
        """Evaluate on broadcastable arrays (internal slot order)."""
        arrays = [np.asarray(a) for a in arrays]
        total = np.zeros(np.broadcast(*arrays).shape, dtype=complex)
        for exp, c in self.terms.items():
            mono = np.full_like(total, c)
            for x, e in zip(arrays, exp):
                if e:
                    mono = mono * x**e
            total = total + mono
        return total

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "PolyField(0)"
        bits = []
        for exp, c in sorted(self.terms.items()):
            mono = "*".join(
                f"x{i + 1}^{e}" for i, e in enumerate(exp) if e
            )
            bits.append(f"({c}){'*' + mono if mono else ''}")
        return "PolyField(" + " + ".join(bits) + ")"


def poly_constant(n: int, value: complex) -> PolyField:
    return PolyField.constant(n, value)


def poly_variable(n: int, a) -> PolyField:
    return PolyField.variable(n, a)


def poly_from_dict(n: int, d: Mapping[tuple, complex]) -> PolyField:
    return PolyField(n, d)
