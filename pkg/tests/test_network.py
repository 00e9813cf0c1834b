from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from dnetgames import (IndeterminateError, Network, PreconditionError, ScalingVector, SizeError,
                       brute_force_transitive, classify, contraction_factor, dan_order, dan_scaling,
                       has_amplifying_link, is_sign_symmetric, is_weak_externalities, is_weak_influences,
                       relative_importance, rescale, scaling_for_weak_externalities,
                       scaling_for_weak_influences, spectral_radius_abs, symmetrize, weighted_max_norm)
from dnetgames.catalog import chain_weights, damped_triangle_weights
from dnetgames.network import SpectralEstimate, symmetry_defect

from conftest import random_rational_matrix

TRIANGLE = damped_triangle_weights(1)
PARASITE = [[1, -2], [0.5, 1]]


def exact(W):
    return Network(W, exact=True)


def test_sign_symmetry_examples():
    assert is_sign_symmetric([[1, 3], [3, 1]])
    assert not is_sign_symmetric(PARASITE)
    assert not is_sign_symmetric(TRIANGLE)


def test_relative_importance_examples():
    r = relative_importance([[1, 2], [0.5, 1]])
    assert r[0, 1] == 4 and r[1, 0] == 0.25
    r = relative_importance(TRIANGLE)
    assert r[0, 2] is None
    r = relative_importance([[1, 3], [3, 1]])
    assert r[0, 1] == 1


def test_symmetrize_examples():
    a = symmetrize(exact([[1, 2], [F(1, 2), 1]]))
    assert list(a.values) == [1, 2]
    V = rescale(exact([[1, 2], [F(1, 2), 1]]), a).weights
    assert V.tolist() == [[1, 1], [1, 1]]
    assert list(symmetrize([[1, 3], [3, 1]]).values) == [1.0, 1.0]
    assert symmetrize(TRIANGLE) is None


def test_symmetrize_irrational_scaling_keeps_exact_squares():
    W = exact([[1, 2], [1, 1]])
    a = symmetrize(W)
    assert not a.exact
    assert list(a.squares) == [1, 2]
    assert symmetry_defect(W, a) == 0


def test_brute_force_transitive_examples():
    assert brute_force_transitive([[1, 3, 1], [3, 1, 2], [1, 2, 1]])
    assert brute_force_transitive(exact([[1, 2, 4], [F(1, 2), 1, 2], [F(1, 4), F(1, 2), 1]]))
    assert not brute_force_transitive(exact([[1, 2, 1], [F(1, 2), 1, 2], [F(1, 4), F(1, 2), 1]]))
    with pytest.raises(SizeError):
        brute_force_transitive(np.eye(11))


def test_dominance_examples():
    half = damped_triangle_weights(0.5)
    assert is_weak_influences(half) and is_weak_externalities(half)
    assert not is_weak_influences(TRIANGLE) and not is_weak_externalities(TRIANGLE)
    assert is_weak_influences(np.eye(4)) and is_weak_externalities(np.eye(4))


def test_boundary_sum_is_not_weak():
    W = exact([[1, F(1, 2), F(1, 2)], [0, 1, 0], [0, 0, 1]])
    assert not is_weak_influences(W)
    assert classify(W).boundary_rows == [0]


@pytest.mark.parametrize("delta", [0.25, 0.5, 0.9])
def test_spectral_radius_of_damped_triangle(delta):
    est = spectral_radius_abs(damped_triangle_weights(delta))
    assert est.value == pytest.approx(delta, rel=1e-9)
    assert est.lower <= delta + 1e-12 and delta <= est.upper + 1e-12


def test_spectral_radius_exact_examples():
    assert spectral_radius_abs(PARASITE).value == pytest.approx(1.0, rel=1e-10)
    est = spectral_radius_abs(np.eye(3))
    assert est.value == 0 and est.upper == 0
    assert spectral_radius_abs(chain_weights(5, 3)).value == 0


def test_spectral_radius_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        spectral_radius_abs(np.eye(2), rel_tol=0)


def test_spectral_radius_reducible_above_one():
    # a transient block with tiny entries next to a block of radius 2
    W = np.array([[1, 2, 0, 0], [2, 1, 0, 0], [1e-6, 0, 1, 1e-6], [0, 0, 1e-6, 1]])
    est = spectral_radius_abs(W)
    assert est.value == pytest.approx(2.0)
    assert est.status() == "not-below"


def test_weak_influences_scaling_examples():
    a = scaling_for_weak_influences(damped_triangle_weights(0.5))
    assert is_weak_influences(rescale(damped_triangle_weights(0.5), a).weights)
    chain = chain_weights(2, 2)
    a = scaling_for_weak_influences(chain)
    V = rescale(chain, a).weights
    assert abs(V[1, 0]) < 1
    assert scaling_for_weak_influences(PARASITE) is None


def test_weak_externalities_scaling_examples():
    chain = chain_weights(2, 2)
    a = scaling_for_weak_externalities(chain)
    assert is_weak_externalities(rescale(chain, a).weights)
    assert scaling_for_weak_externalities(TRIANGLE) is None
    sym = [[1, 0.3], [0.3, 1]]
    a = scaling_for_weak_influences(sym)
    assert is_weak_externalities(rescale(sym, a).weights)


def test_margin_and_indeterminate_band():
    assert scaling_for_weak_influences(damped_triangle_weights(1 - 1e-10)) is None
    a = scaling_for_weak_influences(damped_triangle_weights(1 - 1e-6))
    assert is_weak_influences(rescale(damped_triangle_weights(1 - 1e-6), a).weights)
    straddling = SpectralEstimate(1 - 1e-8, 1 - 2e-8, 1 - 5e-9, 10)
    assert straddling.status() == "indeterminate"
    with pytest.raises(IndeterminateError):
        scaling_for_weak_influences(damped_triangle_weights(0.5), estimate=straddling)


def test_amplifying_links():
    assert has_amplifying_link(PARASITE) == [(0, 1)]
    assert has_amplifying_link(damped_triangle_weights(0.5)) == []
    assert has_amplifying_link([[1, 3], [0.5, 1]]) == [(0, 1)]


def test_dan_order_examples():
    lower = [[1, 0, 0], [2, 1, 0], [1, 1, 1]]
    assert dan_order(lower) == [0, 1, 2]
    upper = np.array(lower).T
    assert dan_order(upper) == [2, 1, 0]
    assert dan_order(TRIANGLE) is None


def test_dan_scaling_examples():
    assert list(dan_scaling(exact(chain_weights(2, 2))).values) == [3, 1]
    assert list(dan_scaling(exact(chain_weights(3, 1))).values) == [3, 2, 1]
    assert all(v > 0 for v in dan_scaling(np.eye(3)).values)
    with pytest.raises(PreconditionError):
        dan_scaling(TRIANGLE)
    with pytest.raises(ValueError):
        dan_scaling(np.eye(2), margin=0.5)


def test_weighted_norm_and_contraction_examples():
    assert weighted_max_norm(np.array([2.0, 3.0]), np.array([1.0, 3.0])) == 2
    M = np.array(damped_triangle_weights(0.5)) - np.eye(3)
    assert weighted_max_norm(M, np.ones(3)) == 0.5
    assert contraction_factor(damped_triangle_weights(0.5), np.ones(3)) == 0.5
    assert contraction_factor(np.eye(3), np.array([1.0, 2.0, 3.0])) == 0
    assert contraction_factor(exact(chain_weights(2, 2)), ScalingVector(np.array([F(3), F(1)], dtype=object))) == F(2, 3)


def test_scaling_vector_must_be_positive():
    with pytest.raises(ValueError):
        ScalingVector(np.array([1.0, 0.0]))


def test_classify_triangle_report():
    r = classify(TRIANGLE)
    assert not r.sign_symmetric and not r.symmetrizable and not r.dan
    assert r.spectral.value == pytest.approx(1.0)
    assert r.spectral_status == "not-below"
    r = classify(damped_triangle_weights(0.5))
    assert r.influences_witness is not None and r.externalities_witness is not None


# ---------------------------------------------------------------- properties


@given(st.integers(0, 10**6), st.integers(2, 6))
@settings(max_examples=60, deadline=None)
def test_rescale_conjugacy_exact(seed, n):
    rng = np.random.default_rng(seed)
    W = exact(random_rational_matrix(rng, n))
    a = ScalingVector(np.array([F(int(rng.integers(1, 9)), int(rng.integers(1, 9))) for _ in range(n)], dtype=object))
    back = rescale(rescale(W, a).weights, a.inverse()).weights
    assert (back == W.weights).all()


def _symmetrizable_matrix(rng, n):
    """Random D S D^-1 with S symmetric: sign-symmetric and transitive by construction."""
    S = random_rational_matrix(rng, n)
    for i in range(n):
        for j in range(i):
            S[i][j] = S[j][i]
    d = [F(int(rng.integers(1, 5)), int(rng.integers(1, 5))) for _ in range(n)]
    return [[S[i][j] * d[j] / d[i] for j in range(n)] for i in range(n)]


@given(st.integers(0, 10**6), st.integers(2, 6), st.booleans())
@settings(max_examples=80, deadline=None)
def test_symmetrize_agrees_with_cycle_oracle(seed, n, planted):
    rng = np.random.default_rng(seed)
    W = _symmetrizable_matrix(rng, n) if planted else random_rational_matrix(rng, n)
    W = exact(W)
    a = symmetrize(W)
    expected = is_sign_symmetric(W) and brute_force_transitive(W)
    assert (a is not None) == expected
    if planted:
        assert a is not None
    if a is not None:
        assert symmetry_defect(W, a) == 0


@given(st.integers(0, 10**6), st.integers(2, 5))
@settings(max_examples=40, deadline=None)
def test_symmetrize_proof_identity(seed, n):
    rng = np.random.default_rng(seed)
    W = np.array(_symmetrizable_matrix(rng, n), dtype=float)
    a = symmetrize(W)
    V = rescale(W, a).weights
    for k in range(n):
        for l in range(n):
            if W[k, l] != 0:
                assert V[k, l] == pytest.approx(np.sign(W[k, l]) * np.sqrt(abs(W[k, l] * W[l, k])), abs=1e-9)


def lp_dominance_witness_exists(W) -> bool:
    """Oracle: some u > 0 with (|W| - I) u < u, decided by a linear program."""
    M = np.abs(np.array(W, dtype=float))
    np.fill_diagonal(M, 0)
    n = M.shape[0]
    # variables (u, s); maximize s subject to (I - M) u >= s, sum u = 1, u >= 0
    c = np.zeros(n + 1)
    c[-1] = -1
    A_ub = np.hstack([-(np.eye(n) - M), np.ones((n, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=[[1] * n + [0]], b_eq=[1],
                  bounds=[(0, None)] * n + [(None, 1)])
    return res.status == 0 and -res.fun > 1e-9


@given(st.integers(0, 10**6), st.integers(2, 6), st.floats(0.1, 1.5))
@settings(max_examples=80, deadline=None)
def test_dominance_witness_equivalences(seed, n, scale):
    rng = np.random.default_rng(seed)
    W = np.eye(n) + scale * rng.uniform(-1, 1, (n, n)) * (rng.random((n, n)) < 0.6) * (1 - np.eye(n)) / n
    est = spectral_radius_abs(W)
    if abs(est.value - 1) <= 1e-8:
        return
    below = est.value < 1
    a_in = scaling_for_weak_influences(W)
    a_ex = scaling_for_weak_externalities(W)
    assert (a_in is not None) == below == (a_ex is not None)
    assert lp_dominance_witness_exists(W) == below
    if a_in is not None:
        assert is_weak_influences(rescale(W, a_in).weights)
        assert is_weak_externalities(rescale(W, a_ex).weights)
        assert has_amplifying_link(W) == []
        M = np.abs(W) - np.eye(n)
        assert np.max(np.abs(np.linalg.matrix_power(M, 64))) < 1e-6 or est.value > 0.8


@given(st.integers(0, 10**6), st.integers(2, 12))
@settings(max_examples=60, deadline=None)
def test_dan_scaling_strict_inequality(seed, n):
    rng = np.random.default_rng(seed)
    L = np.tril(rng.uniform(-3, 3, (n, n)) * (rng.random((n, n)) < 0.5), -1) + np.eye(n)
    perm = rng.permutation(n)
    W = L[np.ix_(perm, perm)]
    order = dan_order(W)
    assert order is not None
    P = W[np.ix_(order, order)]
    assert np.allclose(np.triu(P, 1), 0)
    a = dan_scaling(W)
    assert is_weak_externalities(rescale(W, a).weights)
