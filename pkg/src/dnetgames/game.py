"""Directed network games with logarithmic benefits.

Player ``i`` earns ``log(1 + sum_j w_ij x_j) - c_i x_i`` with ``c_i = 1/(1+t_i)``,
so the unconstrained best response is ``t_i - sum_{j != i} w_ij x_j`` and the
best response clamps it to ``[0, cap_i]``.

Players are indexed from 0 throughout the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import UNBOUNDED, as_matrix, as_vector, frozen, is_exact, to_fraction, to_float
from .errors import DomainError, PreconditionError

LOGARITHMIC = "logarithmic"


class Network:
    """Square weight matrix with unit diagonal.

    ``weights[i, j]`` is the effect of player ``j``'s good on player ``i``.
    """

    __slots__ = ("weights",)

    def __init__(self, weights, exact: bool | None = None):
        if isinstance(weights, Network):
            weights = weights.weights
        if exact is None:
            exact = is_exact(np.asarray(weights)) if isinstance(weights, np.ndarray) else False
        W = as_matrix(weights, exact)
        if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] < 1:
            raise ValueError(f"weights must be a non-empty square matrix, got shape {W.shape}")
        if not exact and not np.all(np.isfinite(W)):
            raise ValueError("weights must be finite")
        for i in range(W.shape[0]):
            if W[i, i] != 1:
                raise ValueError(f"diagonal entry {i} is {W[i, i]}, must equal 1")
        self.weights = frozen(W)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.weights)

    def to_exact(self) -> "Network":
        return self if self.exact else Network(self.weights, exact=True)

    def to_float(self) -> "Network":
        return Network(to_float(self.weights), exact=False) if self.exact else self

    def transpose(self) -> "Network":
        return Network(self.weights.T, exact=self.exact)

    def __eq__(self, other):
        return isinstance(other, Network) and self.exact == other.exact and np.array_equal(
            self.weights, other.weights
        )

    def __hash__(self):
        return hash(tuple(map(tuple, self.weights.tolist())))

    def __repr__(self):
        return f"Network({self.weights.tolist()!r}, exact={self.exact})"


@dataclass(frozen=True)
class BenefitSpec:
    """Benefit family.  Only ``log(1 + s)`` is implemented."""

    family: str = LOGARITHMIC

    def __post_init__(self):
        if self.family != LOGARITHMIC:
            raise ValueError(f"unsupported benefit family {self.family!r}")

    def value(self, s: float) -> float:
        if s <= -1:
            raise DomainError(f"benefit argument 1 + {s} is not positive")
        return math.log1p(float(s))

    def derivative(self, s: float) -> float:
        return 1.0 / (1.0 + float(s))

    @staticmethod
    def cost(target):
        return 1 / (1 + target)


class Game:
    """A network together with targets, capacities and benefit family.

    Capacities may be :data:`UNBOUNDED`.  Assumption ``0 < t_i < cap_i`` is
    reported by :meth:`interior_targets` rather than enforced, because the
    classic small examples place targets on (or above) the capacity.
    """

    __slots__ = ("network", "targets", "caps", "benefit")

    def __init__(self, network, targets, caps=None, benefit: BenefitSpec | None = None,
                 exact: bool | None = None, require_interior: bool = False):
        if not isinstance(network, Network):
            network = Network(network, exact=bool(exact))
        if exact is None:
            exact = network.exact
        network = network.to_exact() if exact else network.to_float()
        n = network.n
        if caps is None:
            caps = [UNBOUNDED] * n
        caps = [UNBOUNDED if _is_unbounded(c) else c for c in caps]
        t = as_vector(list(targets), exact)
        x_bar = as_vector(list(caps), exact)
        if len(t) != n or len(x_bar) != n:
            raise ValueError("targets and caps must have one entry per player")
        for i in range(n):
            if not t[i] > 0 or _is_inf(t[i]):
                raise ValueError(f"target {i} must be positive and finite, got {t[i]}")
            if not x_bar[i] > 0:
                raise ValueError(f"cap {i} must be positive, got {x_bar[i]}")
        object.__setattr__(self, "network", network)
        object.__setattr__(self, "targets", frozen(t))
        object.__setattr__(self, "caps", frozen(x_bar))
        object.__setattr__(self, "benefit", benefit or BenefitSpec())
        if require_interior and not self.interior_targets():
            raise PreconditionError("targets must lie strictly inside (0, cap)")

    def __setattr__(self, name, value):
        raise AttributeError("Game is immutable")

    @property
    def n(self) -> int:
        return self.network.n

    @property
    def weights(self) -> np.ndarray:
        return self.network.weights

    @property
    def exact(self) -> bool:
        return self.network.exact

    @property
    def costs(self) -> np.ndarray:
        return np.array([BenefitSpec.cost(t) for t in self.targets],
                        dtype=object if self.exact else float)

    def interior_targets(self) -> bool:
        return all(0 < t < c for t, c in zip(self.targets, self.caps))

    def to_exact(self) -> "Game":
        if self.exact:
            return self
        return Game(self.network.to_exact(), self.targets, self.caps, self.benefit, exact=True)

    def to_float(self) -> "Game":
        if not self.exact:
            return self
        return Game(self.network.to_float(), to_float(self.targets),
                    [c if _is_inf(c) else float(c) for c in self.caps], self.benefit, exact=False)

    def with_caps(self, caps) -> "Game":
        return Game(self.network, self.targets, caps, self.benefit, exact=self.exact)

    def profile(self, values) -> np.ndarray:
        """Coerce ``values`` into this game's representation and check the box."""
        x = as_vector(list(values), self.exact)
        if len(x) != self.n:
            raise ValueError(f"profile has {len(x)} entries, game has {self.n} players")
        for i in range(self.n):
            if x[i] < 0 or x[i] > self.caps[i]:
                raise ValueError(f"x[{i}] = {x[i]} outside [0, {self.caps[i]}]")
        return x

    def zeros(self) -> np.ndarray:
        return as_vector([0] * self.n, self.exact)

    def __repr__(self):
        return (f"Game(n={self.n}, exact={self.exact}, targets={self.targets.tolist()}, "
                f"caps={self.caps.tolist()})")


def _is_inf(value) -> bool:
    return isinstance(value, float) and math.isinf(value)


def _is_unbounded(value) -> bool:
    return value is None or (isinstance(value, str) and value.strip() == "unbounded") or (
        isinstance(value, (float, np.floating)) and math.isinf(value) and value > 0)


def payoff(game: Game, x, i: int) -> float:
    """``f_i(sum_j w_ij x_j) - c_i x_i``; floating result in both modes."""
    s = game.weights[i] @ x
    return game.benefit.value(s) - float(BenefitSpec.cost(game.targets[i]) * x[i])


def unconstrained_best_response(game: Game, x, i: int):
    W = game.weights
    others = np.arange(game.n) != i
    # leave x_i out of the sum so the result cannot depend on it through rounding
    return game.targets[i] - W[i, others] @ np.asarray(x)[others]


def clamp(value, cap):
    if value < 0:
        return type(value)(0)
    if value > cap:
        return cap
    return value


def best_response(game: Game, x, i: int):
    return clamp(unconstrained_best_response(game, x, i), game.caps[i])


def best_response_vector(game: Game, x) -> np.ndarray:
    out = np.array(x, dtype=object if game.exact else float, copy=True)
    for i in range(game.n):
        out[i] = best_response(game, x, i)
    return out


def nash_residual(game: Game, x):
    return max(abs(x[i] - best_response(game, x, i)) for i in range(game.n))


def is_nash(game: Game, x, tol=None) -> bool:
    """Fixed-point test ``max_i |x_i - b_i(x)| <= tol``.

    Default tolerance is 0 for exact games and 1e-9 otherwise.
    """
    if tol is None:
        tol = 0 if game.exact else 1e-9
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return nash_residual(game, x) <= tol


def make_game(weights, targets, caps=None, exact: bool = False) -> Game:
    return Game(Network(weights, exact=exact), targets, caps, exact=exact)


def to_exact_vector(values) -> np.ndarray:
    return as_vector([to_fraction(v) for v in values], True)
