"""Nash equilibria by boundary-pattern enumeration or contraction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .arith import is_exact, solve_linear
from .errors import ConvergenceError, IndeterminateError, PreconditionError, SizeError
from .game import Game, best_response, nash_residual, unconstrained_best_response
from .network import ScalingVector, scaling_for_weak_influences, spectral_radius_abs

ZERO = "zero"
INTERIOR = "interior"
CAP = "cap"
MAX_ENUMERATION_PLAYERS = 12


@dataclass(frozen=True)
class Equilibrium:
    profile: tuple
    pattern: tuple
    residual: object


@dataclass
class EquilibriumSet:
    equilibria: list = field(default_factory=list)
    complete: bool = True
    continuum: bool = False

    def __len__(self):
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)

    @property
    def profiles(self) -> list[tuple]:
        return [e.profile for e in self.equilibria]

    def contains(self, x, tol=0) -> bool:
        return any(max(abs(float(a) - float(b)) for a, b in zip(e.profile, x)) <= tol
                   for e in self.equilibria)


def boundary_pattern(game: Game, x) -> tuple:
    out = []
    for i in range(game.n):
        if x[i] == 0:
            out.append(ZERO)
        elif x[i] == game.caps[i]:
            out.append(CAP)
        else:
            out.append(INTERIOR)
    return tuple(out)


def _pattern_solution(game: Game, pattern, tol):
    """Profile for one pattern, or (None, continuum flag)."""
    W = game.weights
    exact = game.exact
    n = game.n
    x = game.zeros()
    for i, p in enumerate(pattern):
        if p == CAP:
            x[i] = game.caps[i]
    S = [i for i, p in enumerate(pattern) if p == INTERIOR]
    continuum = False
    if S:
        F = [i for i in range(n) if pattern[i] != INTERIOR]
        A = W[np.ix_(S, S)]
        rhs = np.array([game.targets[i] - sum((W[i, j] * x[j] for j in F), 0 * game.targets[i])
                        for i in S], dtype=object if exact else float)
        sol, status = solve_linear(A, rhs)
        if status == "inconsistent":
            return None, False
        continuum = status == "continuum"
        for k, i in enumerate(S):
            x[i] = sol[k]
    for i, p in enumerate(pattern):
        if p == INTERIOR:
            if x[i] < -tol or x[i] > game.caps[i] + tol:
                return None, continuum
        else:
            bt = unconstrained_best_response(game, x, i)
            if p == ZERO and bt > tol:
                return None, continuum
            if p == CAP and bt < game.caps[i] - tol:
                return None, continuum
    if not exact:
        x = np.clip(x, 0.0, game.caps.astype(float))
    return x, continuum


def solve_enumerate(game: Game, tol=None, max_players: int = MAX_ENUMERATION_PLAYERS) -> EquilibriumSet:
    """All equilibria from the 3^n boundary patterns (zero, interior, cap)."""
    n = game.n
    if n > max_players:
        raise SizeError(f"enumeration limited to {max_players} players, got {n}")
    exact = game.exact
    if tol is None:
        tol = 0 if exact else 1e-9
    choices = []
    for i in range(n):
        opts = [INTERIOR, ZERO]
        if game.caps[i] != float("inf"):
            opts.append(CAP)
        choices.append(opts)
    result = EquilibriumSet()
    seen = []
    for pattern in itertools.product(*choices):
        x, continuum = _pattern_solution(game, pattern, tol)
        result.continuum = result.continuum or continuum
        if x is None:
            continue
        if exact:
            if any(all(a == b for a, b in zip(x, y)) for y in seen):
                continue
        elif any(np.max(np.abs(x - y)) <= 10 * max(tol, 1e-12) for y in seen):
            continue
        seen.append(x)
        result.equilibria.append(Equilibrium(tuple(x), boundary_pattern(game, x), nash_residual(game, x)))
    if result.continuum:
        result.complete = False
    return result


def solve_contraction(game: Game, x0=None, tol: float = 1e-10, max_passes: int = 100_000,
                      scaling: ScalingVector | None = None) -> np.ndarray:
    """Round-robin BRD until ``max_i a_i |x_i - b_i(x)| <= tol`` or a pass changes nothing.

    ``scaling`` must make the network weakly influenced; it is computed when
    omitted.  Runs in floating arithmetic.
    """
    g = game.to_float()
    if scaling is None:
        try:
            scaling = scaling_for_weak_influences(g.network)
        except IndeterminateError as exc:
            raise PreconditionError(f"no dominance witness: {exc}") from exc
        if scaling is None:
            raise PreconditionError("network admits no weak-influences rescaling")
    a = np.asarray(scaling.values, dtype=float)
    x = g.zeros() if x0 is None else g.profile(x0)
    for _ in range(max_passes):
        before = x.copy()
        for i in range(g.n):
            x[i] = best_response(g, x, i)
        gap = max(a[i] * abs(x[i] - best_response(g, x, i)) for i in range(g.n))
        if gap <= tol or np.array_equal(x, before):
            return x
    raise ConvergenceError(f"residual above {tol} after {max_passes} passes")


@dataclass(frozen=True)
class UniquenessVerdict:
    status: str  # "unique", "multiple", "continuum" or "unknown"
    method: str | None
    count: int | None = None
    spectral_radius: float | None = None

    @property
    def unique(self) -> bool:
        return self.status == "unique"


def check_uniqueness(game: Game, max_players: int = 8) -> UniquenessVerdict:
    """Spectral certificate first, then enumeration for small games."""
    rho = None
    try:
        est = spectral_radius_abs(game.network)
        rho = est.value
        if est.status() == "below":
            return UniquenessVerdict("unique", "spectral", 1, rho)
    except (ConvergenceError, IndeterminateError):
        pass
    if game.n <= max_players:
        eq = solve_enumerate(game)
        if eq.continuum:
            return UniquenessVerdict("continuum", "enumeration", None, rho)
        return UniquenessVerdict("unique" if len(eq) == 1 else "multiple", "enumeration", len(eq), rho)
    return UniquenessVerdict("unknown", None, None, rho)
