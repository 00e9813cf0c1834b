from fractions import Fraction as F
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnetgames import (PreconditionError, SizeError, UNBOUNDED, check_uniqueness, is_nash, make_game,
                       solve_contraction, solve_enumerate)
from dnetgames.catalog import chain_weights, directed_triangle_game, host_parasite_game
from dnetgames.game import best_response


def test_enumerate_examples(triangle, parasite_pair):
    assert solve_enumerate(triangle).profiles == [(F(1, 2),) * 3]
    assert solve_enumerate(directed_triangle_game(F(1, 2))).profiles == [(F(2, 3),) * 3]
    eq = solve_enumerate(parasite_pair)
    assert eq.profiles == [(F(3, 2), F(1, 4))]
    assert eq.equilibria[0].pattern == ("interior", "interior")
    assert eq.complete and not eq.continuum


def test_enumerate_floating_mode():
    eq = solve_enumerate(directed_triangle_game(0.5, exact=False))
    assert len(eq) == 1 and np.allclose(eq.profiles[0], 2 / 3)


def test_enumerate_size_budget():
    with pytest.raises(SizeError):
        solve_enumerate(make_game(np.eye(13), [1] * 13))


def test_continuum_flagged():
    # two perfect substitutes: every split of one unit is an equilibrium
    g = make_game([[1, 1], [1, 1]], [1, 1], [2, 2], exact=True)
    eq = solve_enumerate(g)
    assert eq.continuum and not eq.complete


def test_contraction_examples():
    g = directed_triangle_game(0.5, exact=False)
    assert np.allclose(solve_contraction(g, [1, 0, 0], tol=1e-12), 2 / 3, atol=1e-10)
    ident = make_game(np.eye(3), [1, 2, 3])
    assert np.allclose(solve_contraction(ident), [1, 2, 3])
    chain = make_game(chain_weights(2, 2), [1, 1], [10, 10])
    assert np.allclose(solve_contraction(chain), [1, 0])
    with pytest.raises(PreconditionError):
        solve_contraction(directed_triangle_game(1))


def test_uniqueness_examples(triangle):
    v = check_uniqueness(directed_triangle_game(0.5, exact=False))
    assert v.unique and v.method == "spectral"
    v = check_uniqueness(triangle)
    assert v.unique and v.method == "enumeration" and v.count == 1
    assert check_uniqueness(make_game(np.eye(2), [1, 1])).unique


def test_multiple_equilibria_detected():
    # strong substitutes: specialization in either direction
    g = make_game([[1, 2], [2, 1]], [1, 1], [3, 3], exact=True)
    v = check_uniqueness(g)
    assert v.status == "multiple" and v.count == 3


def _random_game(rng, n):
    W = np.eye(n) + rng.uniform(-1.2, 1.2, (n, n)) * (rng.random((n, n)) < 0.6) * (1 - np.eye(n))
    t = rng.uniform(0.3, 1.5, n)
    caps = t + rng.uniform(0.1, 2, n)
    return make_game(np.round(W, 2), np.round(t, 2), np.round(caps, 2), exact=True)


@given(st.integers(0, 10**6), st.integers(1, 5))
@settings(max_examples=60, deadline=None)
def test_existence_and_exact_fixed_points(seed, n):
    g = _random_game(np.random.default_rng(seed), n)
    assert g.interior_targets()
    eq = solve_enumerate(g)
    assert len(eq) >= 1 or eq.continuum
    for e in eq:
        assert is_nash(g, e.profile, 0)


@given(st.integers(0, 10**6), st.integers(2, 5))
@settings(max_examples=40, deadline=None)
def test_contraction_matches_enumeration(seed, n):
    rng = np.random.default_rng(seed)
    W = np.eye(n) + rng.uniform(-1, 1, (n, n)) * (1 - np.eye(n)) * 0.95 / n
    t = rng.uniform(0.5, 1.5, n)
    g = make_game(W, t, t + 1)
    v = check_uniqueness(g)
    assert v.unique and v.method == "spectral"
    eq = solve_enumerate(g.to_exact())
    assert len(eq) == 1
    x = solve_contraction(g, tol=1e-12)
    assert np.allclose(x, [float(v) for v in eq.profiles[0]], atol=1e-9)


def test_grid_oracle_small_game():
    g = make_game([[1, 0.5], [-0.3, 1]], [1, 0.8], [2, 2])
    x = np.array([float(v) for v in solve_enumerate(g.to_exact()).profiles[0]])
    grid = np.linspace(0, 2, 200)
    best = np.inf
    for a, b in itertools.product(grid, grid):
        y = np.array([a, b])
        res = max(abs(y[i] - best_response(g, y, i)) for i in range(2))
        best = min(best, res)
    assert max(abs(x[i] - best_response(g, x, i)) for i in range(2)) <= best
