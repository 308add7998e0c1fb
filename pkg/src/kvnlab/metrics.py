"""Scalar products on the multiform sector and hermiticity analysis.

Several inequivalent inner products make the multiform wave functions a
(possibly indefinite) Hilbert space:

* ``svh``            — the positive-definite product (sector metric = identity);
* ``gauge``          — an indefinite product pairing opposite form degrees;
* ``symplectic``     — block-diagonal product weighting degree-m sectors with
                       i^m powers of the symplectic form (any n);
* ``genSymplectic``  — one-parameter deformation of the symplectic family (n=1);
* ``genGaugeA/B``    — parameterized deformations of the gauge family (n=1).

The central no-go phenomenon: the multiform evolution operator can be made
Hermitian for every Hamiltonian only at the price of an indefinite metric,
and a positive-definite metric leaves it non-Hermitian for anharmonic
Hamiltonians.  :func:`nogo_scan` demonstrates this over finite families;
:func:`hermiticity_report` performs the exact symbolic comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .graded import GradedDiffOp, htilde, htilde_fermionic
from .polyfield import PolyField
from .sector import (
    basis_degrees,
    degree_indices,
    internal_index,
    multiform_from_components,
    omega_upper,
    sector_dim,
    _mask_slots,
)

__all__ = [
    "MetricSpec",
    "HermiticityReport",
    "build_metric",
    "metric_eigenvalues",
    "adjoint",
    "hermiticity_report",
    "nogo_scan",
    "physical_basis",
    "fermionic_kernel_dimension",
    "jacobi_norm_evolution",
]

METRIC_KINDS = (
    "svh",
    "gauge",
    "symplectic",
    "genSymplectic",
    "genGaugeA",
    "genGaugeB",
)

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class MetricSpec:
    """Sector metric g defining <Phi|psi> = integral Phi_i* g^{ij} psi_j."""

    kind: str
    n: int
    params: dict
    g: np.ndarray

    def inner(self, phi: np.ndarray, psi: np.ndarray) -> complex:
        return complex(np.conj(phi) @ self.g @ psi)

    def norm2(self, psi: np.ndarray) -> float:
        return float(np.real(self.inner(psi, psi)))


@dataclass(frozen=True)
class HermiticityReport:
    metric_kind: str
    hamiltonian: PolyField
    residual: float
    verdict: str  # "hermitian" | "non-hermitian"


def _metric_n1(kind: str, params: dict) -> np.ndarray:
    if kind == "gauge":
        return np.array(
            [
                [0, 0, 0, -1j],
                [0, 0, -1j, 0],
                [0, 1j, 0, 0],
                [1j, 0, 0, 0],
            ],
            dtype=complex,
        )
    if kind == "genSymplectic":
        b = params["b"]
        return np.array(
            [
                [1, 0, 0, 0],
                [0, 0, -1j * b, 0],
                [0, 1j * b, 0, 0],
                [0, 0, 0, -b * b],
            ],
            dtype=complex,
        )
    if kind == "genGaugeA":
        th, gI, g03 = params["theta_alpha"], params["gamma_I"], params["g03"]
        ph = np.exp(1j * th)
        return np.array(
            [
                [1j * g03 * ph * gI, 0, 0, g03],
                [0, 0, g03 * ph, 0],
                [0, -g03 * ph, 0, 0],
                [-g03 * ph * ph, 0, 0, 0],
            ],
            dtype=complex,
        )
    if kind == "genGaugeB":
        th, b, g03 = params["theta_alpha"], params["b"], params["g03"]
        ph = np.exp(1j * th)
        return np.array(
            [
                [0, 0, 0, g03],
                [0, 0, g03 * ph, 0],
                [0, -g03 * ph, 0, 0],
                [-g03 * ph * ph, 0, 0, -1j * g03 * ph * b],
            ],
            dtype=complex,
        )
    raise ValueError(kind)


def _symplectic_metric(n: int) -> np.ndarray:
    """Degree-m blocks weighted by i^m determinants of the symplectic pairing."""
    dim = sector_dim(n)
    w = omega_upper(n)
    g = np.zeros((dim, dim), dtype=complex)
    deg = basis_degrees(n)
    for m in range(2 * n + 1):
        idx = degree_indices(n, m)
        for I in idx:
            A = _mask_slots(n, int(I))
            for J in idx:
                B = _mask_slots(n, int(J))
                sub = w[np.ix_([a - 1 for a in A], [b - 1 for b in B])]
                val = (1j) ** m * (np.linalg.det(sub) if m else 1.0)
                if abs(val) > 1e-14:
                    g[I, J] = val
    assert np.all(deg[deg >= 0] >= 0)
    return g


def build_metric(kind: str, n: int, params: dict | None = None) -> MetricSpec:
    """Construct a sector metric; rejects non-Hermitian parameter choices."""
    params = dict(params or {})
    if kind not in METRIC_KINDS:
        raise ValueError(f"unknown metric kind {kind!r}; one of {METRIC_KINDS}")
    if kind == "svh":
        g = np.eye(sector_dim(n), dtype=complex)
    elif kind == "symplectic":
        g = _symplectic_metric(n)
    else:
        if n != 1:
            raise ValueError(f"metric kind {kind!r} is only defined for n=1")
        if kind == "genSymplectic":
            params.setdefault("b", -1.0)
        if kind == "genGaugeA":
            params.setdefault("theta_alpha", 0.0)
            params.setdefault("gamma_I", 0.0)
            params.setdefault("g03", -1j)
        if kind == "genGaugeB":
            params.setdefault("theta_alpha", 0.0)
            params.setdefault("b", 1.0)
            params.setdefault("g03", -1j)
        g = _metric_n1(kind, params)
    herm_defect = np.max(np.abs(g - g.conj().T))
    if herm_defect > _HERM_TOL:
        raise ValueError(
            f"metric {kind!r} with params {params} is not Hermitian "
            f"(defect {herm_defect:.2e}); all norms must be real"
        )
    return MetricSpec(kind=kind, n=n, params=params, g=g)


def metric_eigenvalues(m: MetricSpec) -> np.ndarray:
    """Real eigenvalues of the Hermitian sector metric, ascending."""
    return np.linalg.eigvalsh(m.g)


def classify_metric(m: MetricSpec, tol: float = 1e-10) -> str:
    ev = metric_eigenvalues(m)
    if np.min(np.abs(ev)) <= tol:
        return "degenerate"
    if np.min(ev) > 0:
        return "positive-definite"
    return "indefinite"


def adjoint(A: GradedDiffOp, m: MetricSpec) -> GradedDiffOp:
    """Metric adjoint of a graded differential operator.

    Obtained from integration by parts over phase space (decaying states,
    boundary terms dropped): each derivative term picks up (-1)^{|d|} and a
    Leibniz expansion of the conjugated coefficient; the sector part is
    conjugated with the metric, S -> g^{-1} S^dagger g.
    """
    n = A.n
    ginv = np.linalg.inv(m.g)
    out = GradedDiffOp.zero(n)
    from itertools import product as _iproduct
    from math import comb

    for deriv, mat in A.terms.items():
        sign = (-1) ** sum(deriv)
        # sector conjugation entry-wise: entries are polynomials, so expand
        # g^{-1} S^T* g with polynomial entries kept symbolic
        for (i, j), poly in mat.items():
            pc = poly.conjugate()
            # Leibniz expansion of d^deriv o pc
            ranges = [range(k + 1) for k in deriv]
            for alpha in _iproduct(*ranges):
                bin_c = 1
                for dk, ak in zip(deriv, alpha):
                    bin_c *= comb(dk, ak)
                coeff_poly = pc
                for slot, k in enumerate(
                    tuple(d - a for d, a in zip(deriv, alpha)), start=1
                ):
                    for _ in range(k):
                        coeff_poly = coeff_poly.diff(slot)
                if coeff_poly.is_zero():
                    continue
                # sector: g^{-1} E_{ji} g where E is the unit matrix of the
                # conjugate-transposed entry
                sector = np.outer(ginv[:, j], m.g[i, :])
                term = GradedDiffOp.from_sector(
                    n,
                    sector,
                    coeff_poly * (sign * bin_c),
                    deriv=tuple(alpha),
                )
                out = out + term
    return out


def hermiticity_report(H: PolyField, m: MetricSpec,
                       tol: float = 1e-10) -> HermiticityReport:
    """Compare the multiform evolution operator with its metric adjoint."""
    op = htilde(H)
    diff = op - adjoint(op, m)
    residual = diff.max_abs_coeff()
    return HermiticityReport(
        metric_kind=m.kind,
        hamiltonian=H,
        residual=residual,
        verdict="hermitian" if residual <= tol else "non-hermitian",
    )


def nogo_scan(H_family: Sequence[PolyField], metrics: Sequence[MetricSpec],
              tol: float = 1e-10, max_workers: int | None = None):
    """Scan (Hamiltonian, metric) pairs for joint hermiticity and positivity.

    Returns a list of rows, one per metric:
    ``{"metric": kind, "params", "positive", "hermitian_all",
    "residuals": {H-repr: residual}}``.  No scanned metric can be both
    positive-definite and Hermitian for every anharmonic Hamiltonian; the
    scan demonstrates this over the finite family given (a finite check, not
    a proof of the universal statement).
    """
    from concurrent.futures import ThreadPoolExecutor

    from .runtime import worker_count

    rows = []
    pairs = [(mi, Hi) for mi in range(len(metrics)) for Hi in range(len(H_family))]

    def job(pair):
        mi, Hi = pair
        return mi, Hi, hermiticity_report(H_family[Hi], metrics[mi], tol)

    results = {}
    nw = worker_count(max_workers)
    if nw > 1 and pairs:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            for mi, Hi, rep in ex.map(job, pairs):
                results[(mi, Hi)] = rep
    else:
        for pair in pairs:
            mi, Hi, rep = job(pair)
            results[(mi, Hi)] = rep
    for mi, m in enumerate(metrics):
        reps = [results[(mi, Hi)] for Hi in range(len(H_family))]
        rows.append(
            {
                "metric": m.kind,
                "params": dict(m.params),
                "positive": classify_metric(m) == "positive-definite",
                "hermitian_all": all(r.verdict == "hermitian" for r in reps),
                "residuals": [r.residual for r in reps],
                "min_eig": float(np.min(metric_eigenvalues(m))),
                "max_eig": float(np.max(metric_eigenvalues(m))),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# physical subspaces
# ---------------------------------------------------------------------------


def _omega_pattern(n: int) -> np.ndarray:
    """Sector vector of sum_i c^{q_i} c^{p_i} (the symplectic two-form)."""
    comps = []
    for i in range(1, n + 1):
        comps.append(((("q", i), ("p", i)), 1.0))
    return multiform_from_components(n, comps)


def _wedge(n: int, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Exterior product of two multiform vectors."""
    out = np.zeros(sector_dim(n), dtype=complex)
    full = sector_dim(n) - 1
    for I in np.nonzero(v)[0]:
        for J in np.nonzero(w)[0]:
            if int(I) & int(J):
                continue
            A = _mask_slots(n, int(I))
            B = _mask_slots(n, int(J))
            # sign of merging the two ascending words
            sign = 1
            word = list(A)
            for r in B:
                pos = sum(1 for x in word if x < r)
                if (len(word) - pos) % 2:
                    sign = -sign
                word.insert(pos, r)
            out[int(I) | int(J)] += sign * v[I] * w[J]
    assert full >= 0
    return out


def physical_basis(kind: str, n: int):
    """Evolution-closed sector patterns with definite norms.

    svh: powers of the symplectic two-form (each annihilated by the
    form-mixing part of the evolution operator for every Hamiltonian).
    symplectic: the same tower written in the complex ladder combinations
    xi^i = (c^{q_i} + i c^{p_i})/sqrt(2), whose pair products
    xi^i xi^{i*} = -i c^{q_i} c^{p_i} rescale each level by (-i)^m.

    Returns a list of ``{"degree": 2m, "vector": ndarray, "label": str}``;
    each vector multiplies a free scalar coefficient function.
    """
    if kind not in ("svh", "symplectic"):
        raise ValueError(f"physical basis not defined for kind {kind!r}")
    omega_vec = _omega_pattern(n)
    out = []
    cur = np.zeros(sector_dim(n), dtype=complex)
    cur[0] = 1.0
    for mdeg in range(n + 1):
        scale = 1.0 if kind == "svh" else (-1j) ** mdeg
        out.append(
            {
                "degree": 2 * mdeg,
                "vector": cur * scale,
                "label": f"(sum_i c^q_i c^p_i)^{mdeg}"
                if kind == "svh"
                else f"(sum_i xi_i xi*_i)^{mdeg}",
            }
        )
        if mdeg < n:
            cur = _wedge(n, cur, omega_vec)
    return out


def fermionic_kernel_dimension(n: int, degree: int,
                               hamiltonians: Iterable[PolyField] | None = None,
                               tol: float = 1e-10) -> int:
    """Dimension of the common kernel of the form-mixing evolution part.

    The kernel is taken over a family of Hamiltonians (default: several
    random non-degenerate quadratics), restricted to the degree-``degree``
    sector; states in it are transported trivially for every Hamiltonian of
    the family.
    """
    rng = np.random.default_rng(7)
    if hamiltonians is None:
        hams = []
        for _ in range(4):
            # random non-degenerate quadratic Hamiltonian
            A = rng.standard_normal((2 * n, 2 * n))
            A = A + A.T + np.eye(2 * n) * 0.5
            terms = {}
            for a in range(2 * n):
                for b in range(a, 2 * n):
                    e = [0] * (2 * n)
                    e[a] += 1
                    e[b] += 1
                    coeff = A[a, b] if a == b else A[a, b]
                    terms[tuple(e)] = terms.get(tuple(e), 0) + coeff
            hams.append(PolyField(n, terms))
    else:
        hams = list(hamiltonians)
    idx = degree_indices(n, degree)
    blocks = []
    for H in hams:
        ferm = htilde_fermionic(H)
        mat = np.zeros((sector_dim(n), sector_dim(n)), dtype=complex)
        for deriv, md in ferm.terms.items():
            if any(deriv):
                raise ValueError("fermionic part must be derivative-free")
            for (i, j), poly in md.items():
                # evaluate at a generic point; quadratic H gives constants
                pt = rng.standard_normal(2 * n)
                mat[i, j] = poly(pt)
        blocks.append(mat[np.ix_(idx, idx)])
    stacked = np.vstack(blocks)
    s = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s[0] if len(s) else 1.0)))


# ---------------------------------------------------------------------------
# trajectory-linearization transport vs. one-form norms
# ---------------------------------------------------------------------------


def _grad_and_hess(H: PolyField):
    n = H.n
    grads = [H.diff(a) for a in range(1, 2 * n + 1)]
    hess = [
        [H.diff(a).diff(b) for b in range(1, 2 * n + 1)]
        for a in range(1, 2 * n + 1)
    ]
    return grads, hess


def jacobi_norm_evolution(H: PolyField, points: np.ndarray,
                          covectors: np.ndarray, t: float,
                          steps: int = 400):
    """Co-evolve one-form components and trajectory separations.

    ``points``: (N, 2n) initial phase-space points in internal slot order;
    ``covectors``: (N, 2n) initial one-form component vectors (complex).
    Both the sector components (in the contraction representation, where
    they transform exactly like infinitesimal trajectory separations) and
    independent separation vectors are integrated with the same linearized
    flow, and their positive norms are returned as time series.

    Returns dict with "times", "norm_form", "norm_jacobi" (each series
    summed over the sample points), plus the final vectors.
    """
    n = H.n
    w = omega_upper(n)
    grads, hess = _grad_and_hess(H)
    pts = np.array(points, dtype=float)
    psi = np.array(covectors, dtype=complex)
    dphi = np.array(covectors, dtype=complex)
    if pts.ndim == 1:
        pts = pts[None, :]
        psi = psi[None, :]
        dphi = dphi[None, :]
    N = pts.shape[0]
    dt = t / steps

    def flow_rhs(x):
        g = np.stack(
            [np.array([gr(xi).real for gr in grads]) for xi in x]
        )
        return g @ w.T  # xdot^a = omega^{ab} dH/dphi^b

    def m_matrix(x):
        Hmat = np.stack(
            [
                np.array(
                    [[hess[a][b](xi).real for b in range(2 * n)]
                     for a in range(2 * n)]
                )
                for xi in x
            ]
        )
        return np.einsum("ab,nbc->nac", w, Hmat)

    times = np.empty(steps + 1)
    norm_form = np.empty(steps + 1)
    norm_jac = np.empty(steps + 1)

    def record(k):
        times[k] = k * dt
        norm_form[k] = float(np.sum(np.abs(psi) ** 2))
        norm_jac[k] = float(np.sum(np.abs(dphi) ** 2))

    record(0)
    for k in range(1, steps + 1):
        # RK4 on the joint system (trajectory, two linearized vectors)
        def deriv(state):
            x, a, b = state
            M = m_matrix(x)
            return (
                flow_rhs(x),
                np.einsum("nab,nb->na", M, a),
                np.einsum("nab,nb->na", M, b),
            )

        s0 = (pts, psi, dphi)
        k1 = deriv(s0)
        s1 = tuple(v + 0.5 * dt * d for v, d in zip(s0, k1))
        k2 = deriv(s1)
        s2 = tuple(v + 0.5 * dt * d for v, d in zip(s0, k2))
        k3 = deriv(s2)
        s3 = tuple(v + dt * d for v, d in zip(s0, k3))
        k4 = deriv(s3)
        pts = pts + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        psi = psi + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        dphi = dphi + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        record(k)
    return {
        "times": times,
        "norm_form": norm_form,
        "norm_jacobi": norm_jac,
        "final_form": psi,
        "final_jacobi": dphi,
    }
