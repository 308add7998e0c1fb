"""Matrix realization of the Grassmann operators on the multiform sector.

The exterior algebra over a 2n-dimensional phase space is carried by a
2^(2n)-dimensional vector space.  The raising operators ``c^a`` (wedge by a
basis one-form) and the lowering operators ``cbar_a`` (contraction) are
realized as Kronecker strings of Pauli blocks,

    c^a    = sigma_z^(a-1) (x) sigma_minus (x) 1^(2n-a)
    cbar_a = transpose(c^a)

where ``sigma_minus = [[0,0],[1,0]]`` and the first Kronecker factor is the
most significant bit of the basis index.

Index bookkeeping
-----------------
Internally the 2n slots are ordered ``p_1, q_1, p_2, q_2, ...`` so that slot
``2i-1`` carries ``p_i`` and slot ``2i`` carries ``q_i``.  The public API also
accepts labels: ``"q"``/``"p"`` (n=1), ``"q1"``, ``"p2"``, or tuples
``("q", i)``.  Basis vector ``k`` (0-based) excites the slots set in the
bitmask of ``k``, with slot 1 as the most significant bit; a basis vector with
slots ``a1 < a2 < ... < ap`` excited represents the monomial
``c^{a1} c^{a2} ... c^{ap}`` applied to the vacuum (coefficient +1).

For n=1 the basis is therefore ``(psi_0, psi_q, psi_p, psi_2)`` with the
two-form component multiplying ``c^p c^q``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

import numpy as np
import scipy.sparse as sp

__all__ = [
    "DEFAULT_N_MAX",
    "internal_index",
    "internal_labels",
    "sector_dim",
    "build_c",
    "build_cbar",
    "anticommutator",
    "commutator",
    "number_operator",
    "form_number_operator",
    "basis_degrees",
    "degree_indices",
    "form_components",
    "multiform_from_components",
    "omega_upper",
    "omega_lower",
]

DEFAULT_N_MAX = 6


def sector_dim(n: int) -> int:
    """Dimension 4**n of the multiform sector for n degrees of freedom."""
    return 1 << (2 * n)


def _check_n(n: int, n_max: int = DEFAULT_N_MAX) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > n_max:
        raise ValueError(
            f"n={n} exceeds the configured maximum {n_max} "
            f"(sector dimension {4 ** n}); raise n_max explicitly if intended"
        )


def internal_index(n: int, a) -> int:
    """Resolve an operator index to the internal slot in 1..2n.

    Accepts an integer (already internal), a string label ("q", "p", "q1",
    "p2", ...) or a tuple ("q"|"p", i).  Slot 2i-1 is p_i, slot 2i is q_i.
    """
    if isinstance(a, (int, np.integer)):
        idx = int(a)
        if not 1 <= idx <= 2 * n:
            raise IndexError(f"internal index {idx} out of range 1..{2 * n}")
        return idx
    if isinstance(a, tuple):
        kind, i = a
    elif isinstance(a, str):
        kind = a[0]
        rest = a[1:]
        if rest:
            i = int(rest)
        else:
            if n != 1:
                raise IndexError(
                    f"bare label {a!r} is only valid for n=1; use e.g. '{a}1'"
                )
            i = 1
    else:
        raise TypeError(f"cannot interpret operator index {a!r}")
    if kind not in ("q", "p"):
        raise IndexError(f"label kind must be 'q' or 'p', got {kind!r}")
    if not 1 <= int(i) <= n:
        raise IndexError(f"degree-of-freedom index {i} out of range 1..{n}")
    return 2 * int(i) - 1 if kind == "p" else 2 * int(i)


def internal_labels(n: int) -> list[str]:
    """Labels of the internal slots in order: p1, q1, p2, q2, ..."""
    out = []
    for i in range(1, n + 1):
        out.append(f"p{i}")
        out.append(f"q{i}")
    return out


@lru_cache(maxsize=None)
def _build_c_cached(n: int, slot: int) -> sp.csr_matrix:
    sz = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
    sminus = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))
    one = sp.identity(2, format="csr")
    mat = sp.identity(1, format="csr")
    for k in range(1, 2 * n + 1):
        if k < slot:
            blk = sz
        elif k == slot:
            blk = sminus
        else:
            blk = one
        mat = sp.kron(mat, blk, format="csr")
    return mat


def build_c(n: int, a, n_max: int = DEFAULT_N_MAX) -> sp.csr_matrix:
    """Raising operator c^a (wedge by the a-th basis one-form)."""
    _check_n(n, n_max)
    slot = internal_index(n, a)
    return _build_c_cached(n, slot).copy()


def build_cbar(n: int, a, n_max: int = DEFAULT_N_MAX) -> sp.csr_matrix:
    """Lowering operator cbar_a; the transpose of build_c(n, a)."""
    _check_n(n, n_max)
    slot = internal_index(n, a)
    return _build_c_cached(n, slot).transpose().tocsr()


def _as_csr(A) -> sp.csr_matrix:
    if sp.issparse(A):
        return A.tocsr()
    return sp.csr_matrix(np.asarray(A))


def anticommutator(A, B) -> sp.csr_matrix:
    """AB + BA."""
    A, B = _as_csr(A), _as_csr(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return (A @ B + B @ A).tocsr()


def commutator(A, B) -> sp.csr_matrix:
    """AB - BA."""
    A, B = _as_csr(A), _as_csr(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return (A @ B - B @ A).tocsr()


def number_operator(n: int, a, n_max: int = DEFAULT_N_MAX) -> sp.csr_matrix:
    """Occupation projector N_a = c^a cbar_a (diagonal, entries in {0,1})."""
    c = build_c(n, a, n_max)
    return (c @ c.transpose()).tocsr()


def form_number_operator(n: int, n_max: int = DEFAULT_N_MAX) -> sp.csr_matrix:
    """Form-degree operator Q_f = sum_a c^a cbar_a (diagonal, eigenvalue p)."""
    _check_n(n, n_max)
    dim = sector_dim(n)
    return sp.diags(basis_degrees(n).astype(float), shape=(dim, dim)).tocsr()


def basis_degrees(n: int) -> np.ndarray:
    """Form degree (bitmask popcount) of each basis vector, length 4**n."""
    idx = np.arange(sector_dim(n))
    return np.array([bin(k).count("1") for k in idx], dtype=int)


def degree_indices(n: int, p: int) -> np.ndarray:
    """Basis indices (0-based) of the degree-p subspace, ascending."""
    if not 0 <= p <= 2 * n:
        raise ValueError(f"degree {p} out of range 0..{2 * n}")
    deg = basis_degrees(n)
    return np.nonzero(deg == p)[0]


def _mask_slots(n: int, mask: int) -> tuple[int, ...]:
    """Excited internal slots (ascending) of a basis bitmask."""
    return tuple(a for a in range(1, 2 * n + 1) if mask & (1 << (2 * n - a)))


def _slots_mask(n: int, slots: Iterable[int]) -> int:
    mask = 0
    for a in slots:
        bit = 1 << (2 * n - a)
        if mask & bit:
            raise ValueError(f"repeated index {a} in multi-index")
        mask |= bit
    return mask


def form_components(v: np.ndarray, p: int, n: int | None = None):
    """Degree-p components of a multiform vector.

    Returns a list of ``(labels, coefficient)`` with ``labels`` the tuple of
    slot labels of the monomial ``c^{a1}...c^{ap}`` in ascending internal
    order; zero coefficients are omitted.
    """
    v = np.asarray(v)
    if n is None:
        n = int(round(np.log2(v.size) / 2))
    if v.size != sector_dim(n):
        raise ValueError(f"vector length {v.size} is not 4**n for n={n}")
    if not 0 <= p <= 2 * n:
        raise ValueError(f"degree {p} out of range 0..{2 * n}")
    labels = internal_labels(n)
    out = []
    for k in degree_indices(n, p):
        if v[k] != 0:
            slots = _mask_slots(n, int(k))
            out.append((tuple(labels[a - 1] for a in slots), v[k]))
    return out


def multiform_from_components(n: int, components) -> np.ndarray:
    """Assemble a multiform vector from ``(indices, coefficient)`` pairs.

    ``indices`` is an iterable of operator indices (labels or internal ints);
    the coefficient multiplies ``c^{a1}...c^{ap}`` in the order given, with
    the sign of sorting into ascending internal order applied automatically.
    """
    v = np.zeros(sector_dim(n), dtype=complex)
    for indices, coeff in components:
        slots = [internal_index(n, a) for a in indices]
        sign = 1
        arr = list(slots)
        # parity of the permutation sorting the word into canonical order
        for i in range(len(arr)):
            for j in range(len(arr) - 1 - i):
                if arr[j] > arr[j + 1]:
                    arr[j], arr[j + 1] = arr[j + 1], arr[j]
                    sign = -sign
        v[_slots_mask(n, arr)] += sign * coeff
    return v


def omega_upper(n: int) -> np.ndarray:
    """Symplectic matrix omega^{ab} on internal slots (omega^{q_i p_i} = +1)."""
    w = np.zeros((2 * n, 2 * n))
    for i in range(1, n + 1):
        p_slot, q_slot = 2 * i - 2, 2 * i - 1  # 0-based internal p_i, q_i
        w[q_slot, p_slot] = 1.0
        w[p_slot, q_slot] = -1.0
    return w


def omega_lower(n: int) -> np.ndarray:
    """Inverse symplectic matrix omega_{ab} (omega_{ab} omega^{bc} = delta)."""
    return np.linalg.inv(omega_upper(n))
