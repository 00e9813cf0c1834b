"""Small named games used in documentation, tests and the CLI examples."""

from __future__ import annotations

from fractions import Fraction

from .arith import UNBOUNDED, to_fraction
from .game import Game, Network


def damped_triangle_weights(delta=1):
    """Directed 3-cycle where player 1 listens to 3, 2 to 1 and 3 to 2, with weight ``delta``."""
    return [[1, 0, delta], [delta, 1, 0], [0, delta, 1]]


def directed_triangle_game(delta=1, caps=None, exact: bool = True) -> Game:
    """Unit targets on the damped triangle.  ``delta = 1`` with unit caps cycles under BRD."""
    if exact:
        delta = to_fraction(delta)
    caps = [1, 1, 1] if caps is None and delta == 1 else caps
    return Game(Network(damped_triangle_weights(delta), exact=exact), [1, 1, 1], caps, exact=exact)


def host_parasite_game(caps=(2, Fraction(1, 2)), exact: bool = True) -> Game:
    """Player 2 benefits from player 1 (weight 1/2) and harms it (weight -2)."""
    caps = [UNBOUNDED, UNBOUNDED] if caps is None else list(caps)
    return Game(Network([[1, -2], [Fraction(1, 2), 1]], exact=exact), [1, 1], caps, exact=exact)


def chain_weights(n: int, weight=1):
    """Player ``k`` listens to player ``k - 1`` only."""
    W = [[0] * n for _ in range(n)]
    for i in range(n):
        W[i][i] = 1
        if i:
            W[i][i - 1] = weight
    return W
