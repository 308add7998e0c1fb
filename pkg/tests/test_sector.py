"""Ladder-operator algebra and basis bookkeeping on the Grassmann sector."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kvnlab.sector import (
    anticommutator,
    basis_degrees,
    build_c,
    build_cbar,
    degree_indices,
    form_components,
    form_number_operator,
    internal_index,
    internal_labels,
    multiform_from_components,
    omega_lower,
    omega_upper,
    sector_dim,
)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_anticommutators(n):
    cs = [build_c(n, a) for a in range(1, 2 * n + 1)]
    cbs = [build_cbar(n, a) for a in range(1, 2 * n + 1)]
    eye = np.eye(sector_dim(n))
    for a in range(2 * n):
        for b in range(2 * n):
            assert abs(anticommutator(cs[a], cs[b])).max() <= 1e-12
            assert abs(anticommutator(cbs[a], cbs[b])).max() <= 1e-12
            target = eye if a == b else 0.0
            assert (
                abs(anticommutator(cs[a], cbs[b]).toarray() - target).max()
                <= 1e-12
            )


def test_single_dof_ladder_matrices():
    # basis (1, c^q, c^p, c^p c^q): creation by c^q populates slot 2
    cq = build_c(1, "q").toarray()
    cp = build_c(1, "p").toarray()
    want_cq = np.zeros((4, 4))
    want_cq[1, 0] = 1.0
    want_cq[3, 2] = -1.0
    want_cp = np.zeros((4, 4))
    want_cp[2, 0] = 1.0
    want_cp[3, 1] = 1.0
    assert np.allclose(cq, want_cq)
    assert np.allclose(cp, want_cp)
    assert np.allclose(build_cbar(1, "q").toarray(), want_cq.T)


def test_internal_ordering_and_labels():
    assert internal_index(2, ("p", 1)) == 1
    assert internal_index(2, ("q", 1)) == 2
    assert internal_index(2, ("p", 2)) == 3
    assert internal_index(2, ("q", 2)) == 4
    assert internal_labels(2) == ["p1", "q1", "p2", "q2"]
    # one-form sector of n=2 sits at basis indices 1, 2, 4, 8 (0-based)
    assert list(degree_indices(2, 1)) == [1, 2, 4, 8]


def test_degree_bookkeeping():
    for n in (1, 2):
        deg = basis_degrees(n)
        N = form_number_operator(n).toarray()
        assert np.allclose(np.diag(N), deg)
        assert sum(len(degree_indices(n, p)) for p in range(2 * n + 1)) == (
            sector_dim(n)
        )


def test_form_components_round_trip():
    rng = np.random.default_rng(5)
    n = 2
    comps = [
        ((("q", 1), ("p", 2)), rng.standard_normal()),
        ((("p", 1), ("q", 2)), rng.standard_normal()),
    ]
    v = multiform_from_components(n, comps)
    back = dict(form_components(v, 2))
    for idx, coeff in comps:
        key = tuple(sorted(internal_index(n, x) for x in idx))
        found = [c for k, c in back.items()
                 if tuple(internal_index(n, x) for x in k) == key]
        assert found and abs(abs(found[0]) - abs(coeff)) < 1e-12


def test_reordered_word_changes_sign():
    n = 1
    v1 = multiform_from_components(n, [((("q", 1), ("p", 1)), 1.0)])
    v2 = multiform_from_components(n, [((("p", 1), ("q", 1)), 1.0)])
    assert np.allclose(v1, -v2)


@given(st.integers(min_value=1, max_value=3))
@settings(max_examples=10, deadline=None)
def test_symplectic_pairing_inverse(n):
    w = omega_upper(n)
    wl = omega_lower(n)
    assert np.allclose(w @ wl, np.eye(2 * n))
    assert np.allclose(w, -w.T)
    # pairing of q against p is +1 per degree of freedom
    for i in range(1, n + 1):
        qs = internal_index(n, ("q", i)) - 1
        ps = internal_index(n, ("p", i)) - 1
        assert w[qs, ps] == 1.0
