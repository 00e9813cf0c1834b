"""Best-response potentials.

* symmetric quadratic ``x.t - x.W.x / 2`` for symmetric networks;
* rescaled quadratic ``sum a_i^2 x_i t_i - sum_ij a_i^2 w_ij x_i x_j / 2``
  for a symmetrizing scaling ``a``;
* weighted L1 ``-sum a_i |x_i - b_i(x)|`` for a column-dominance scaling ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import is_exact
from .errors import PreconditionError, WitnessError
from .game import Game, best_response
from .network import ScalingVector, symmetry_defect

SYMMETRIC = "symmetric"
RESCALED = "rescaled"
WEIGHTED_L1 = "weighted-l1"
GOLDEN = (math.sqrt(5) - 1) / 2


def _tol(game: Game, tol):
    if tol is not None:
        return tol
    return 0 if game.exact else 1e-9


def _scaling(a) -> ScalingVector:
    return a if isinstance(a, ScalingVector) else ScalingVector(np.asarray(a) if not isinstance(a, np.ndarray) else a)


def _zero_like(game: Game):
    return game.targets[0] * 0


def eval_symmetric_quadratic(game: Game, x, tol=None):
    W = game.weights
    tol = _tol(game, tol)
    n = game.n
    if any(abs(W[i, j] - W[j, i]) > tol for i in range(n) for j in range(i + 1, n)):
        raise PreconditionError("symmetric quadratic needs a symmetric network")
    return sum(x[i] * game.targets[i] for i in range(n)) - sum(
        x[i] * W[i, j] * x[j] for i in range(n) for j in range(n)) / 2


def check_symmetrizing(game: Game, a, tol=None) -> None:
    a = _scaling(a)
    defect = symmetry_defect(game.weights, a)
    if defect > _tol(game, tol):
        raise WitnessError(f"scaling does not symmetrize the network (defect {defect})")


def eval_rescaled_quadratic(game: Game, a, x, check: bool = True, tol=None):
    a = _scaling(a)
    if check:
        check_symmetrizing(game, a, tol)
    s = a.squared()
    W = game.weights
    n = game.n
    if is_exact(s) != game.exact:
        s = np.array([float(v) for v in s])
        x = [float(v) for v in x]
        W = W.astype(float)
        t = game.targets.astype(float)
    else:
        t = game.targets
    linear = sum(s[i] * x[i] * t[i] for i in range(n))
    quad = sum(s[i] * W[i, j] * x[i] * x[j] for i in range(n) for j in range(n))
    return linear - quad / 2


def rescaled_quadratic_gradient(game: Game, a, x) -> np.ndarray:
    """``a_i^2 (t_i - sum_j w_ij x_j)``."""
    s = _scaling(a).squared()
    W = game.weights
    exact = game.exact and is_exact(s)
    out = np.empty(game.n, dtype=object if exact else float)
    for i in range(game.n):
        out[i] = s[i] * (game.targets[i] - sum(W[i, j] * x[j] for j in range(game.n)))
    return out


def check_column_dominance(game: Game, a) -> None:
    """``sum_{i != j} a_i |w_ij| < a_j`` for every column ``j``."""
    a = _scaling(a).values
    W = game.weights
    n = game.n
    for j in range(n):
        if not sum(a[i] * abs(W[i, j]) for i in range(n) if i != j) < a[j]:
            raise WitnessError(f"scaling fails the column inequality at player {j + 1}")


def eval_weighted_l1(game: Game, a, x, check: bool = True):
    a = _scaling(a)
    if check:
        check_column_dominance(game, a)
    vals = a.values
    return -sum(vals[i] * abs(x[i] - best_response(game, x, i)) for i in range(game.n))


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    scaling: ScalingVector | None = None

    def __post_init__(self):
        if self.kind not in (SYMMETRIC, RESCALED, WEIGHTED_L1):
            raise ValueError(f"unknown potential {self.kind!r}")
        if self.kind != SYMMETRIC and self.scaling is None:
            raise ValueError(f"{self.kind} potential needs a scaling vector")

    def check(self, game: Game) -> None:
        if self.kind == RESCALED:
            check_symmetrizing(game, self.scaling)
        elif self.kind == WEIGHTED_L1:
            check_column_dominance(game, self.scaling)

    def evaluate(self, game: Game, x, check: bool = False):
        if self.kind == SYMMETRIC:
            return eval_symmetric_quadratic(game, x)
        if self.kind == RESCALED:
            return eval_rescaled_quadratic(game, self.scaling, x, check=check)
        return eval_weighted_l1(game, self.scaling, x, check=check)


@dataclass
class PotentialReport:
    samples: int
    max_deviation: float
    counterexample: dict | None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _golden_max(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (a + b) / 2


def verify_br_potential(game: Game, potential: PotentialSpec, sample_count: int = 200,
                        grid_size: int = 101, seed: int = 0, resolution: float = 1e-4) -> PotentialReport:
    """Compare the coordinate-wise argmax of the potential with the best response.

    Each sample draws a player and a profile, scans a grid on the player's
    interval, refines around the best grid point by golden section, and
    records the distance to the best response.  Unbounded caps are truncated
    well beyond the relevant range.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    g = game.to_float()
    rng = np.random.default_rng(seed)
    n = g.n
    spec = potential if potential.scaling is None else PotentialSpec(
        potential.kind, ScalingVector(np.array([float(v) for v in potential.scaling.values]),
                                      None if potential.scaling.squares is None else
                                      np.array([float(v) for v in potential.scaling.squares])))
    sample_hi = np.array([c if math.isfinite(c) else 2 * t for c, t in zip(g.caps, g.targets)])
    worst = 0.0
    counterexample = None
    for _ in range(sample_count):
        i = int(rng.integers(n))
        x = rng.uniform(0, sample_hi)
        b = best_response(g, x, i)
        hi = g.caps[i] if math.isfinite(g.caps[i]) else 2 * max(b, g.targets[i]) + 1

        def f(v, x=x, i=i):
            y = x.copy()
            y[i] = v
            return spec.evaluate(g, y)

        grid = np.linspace(0.0, hi, grid_size)
        values = [f(v) for v in grid]
        k = int(np.argmax(values))
        lo_b, hi_b = grid[max(k - 1, 0)], grid[min(k + 1, grid_size - 1)]
        best = _golden_max(f, lo_b, hi_b)
        for edge in (0.0, hi):
            if f(edge) > f(best):
                best = edge
        dev = abs(best - b)
        worst = max(worst, dev)
        if dev > resolution and counterexample is None:
            counterexample = {"player": i, "profile": x.tolist(), "argmax": best, "best_response": b}
    return PotentialReport(sample_count, worst, counterexample)
