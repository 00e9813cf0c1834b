import numpy as np
import pytest
from fractions import Fraction

from dnetgames.catalog import directed_triangle_game, host_parasite_game


@pytest.fixture
def triangle():
    return directed_triangle_game(1)


@pytest.fixture
def parasite_pair():
    return host_parasite_game()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_rational_matrix(rng, n, zero_prob=0.4, denominators=(1, 2, 3, 4)):
    W = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() >= zero_prob:
                W[i][j] = Fraction(int(rng.integers(-6, 7)) or 1, int(rng.choice(denominators)))
    return W
