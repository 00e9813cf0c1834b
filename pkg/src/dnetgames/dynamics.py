"""One-sided best-response dynamics with pluggable schedules.

Exactly one player revises per period.  The revision rule is a
:class:`DynamicSpec`: jump to the best response (BRD), approach it without
crossing (BRAD), or land close to it with overshoot allowed (BRCD).
Cycles are certified by exact profile revisits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .arith import is_exact, to_fraction
from .errors import ConfigurationError
from .game import Game, best_response, clamp, is_nash

BRD = "brd"
BRAD = "brad"
BRCD = "brcd"
OVERSHOOT_RULES = ("+", "-", "alternating", "random")


# ---------------------------------------------------------------- schedules


class Schedule:
    """Rule assigning the revising player to each period (0-based players)."""

    #: every player appears in every window of this length, if known
    regular_window: int | None = None

    def players(self) -> Iterator[int]:
        raise NotImplementedError

    def materialize(self, length: int) -> list[int]:
        return list(itertools.islice(self.players(), length))

    def describe(self) -> dict:
        raise NotImplementedError

    def check(self, n: int) -> None:
        for i in self.materialize(max(n, 64)):
            if not 0 <= i < n:
                raise ConfigurationError(f"schedule names player {i + 1}, game has {n}")


class RoundRobin(Schedule):
    def __init__(self, n: int, order=None):
        order = list(range(n)) if order is None else [int(i) for i in order]
        if sorted(order) != list(range(n)):
            raise ConfigurationError(f"round-robin order must be a permutation of {n} players")
        self.order = order
        self.regular_window = n

    def players(self):
        return itertools.cycle(self.order)

    def describe(self):
        return {"kind": "round-robin", "order": [i + 1 for i in self.order]}


class Cyclic(Schedule):
    """A finite sequence repeated forever."""

    def __init__(self, sequence):
        self.sequence = [int(i) for i in sequence]
        if not self.sequence:
            raise ConfigurationError("cyclic schedule needs at least one player")

    def players(self):
        return itertools.cycle(self.sequence)

    def describe(self):
        return {"kind": "cyclic", "sequence": [i + 1 for i in self.sequence]}


class RandomUniform(Schedule):
    """Independent uniform draws from a seeded generator."""

    def __init__(self, n: int, seed: int | None = 0):
        self.n = n
        self.seed = seed

    def players(self):
        rng = np.random.default_rng(self.seed)
        while True:
            for i in rng.integers(0, self.n, size=256):
                yield int(i)

    def describe(self):
        return {"kind": "random", "n": self.n, "seed": self.seed}


class Scripted(Schedule):
    """A finite prefix followed by round-robin over all players."""

    def __init__(self, prefix, n: int):
        self.prefix = [int(i) for i in prefix]
        self.n = n

    def players(self):
        return itertools.chain(self.prefix, itertools.cycle(range(self.n)))

    def describe(self):
        return {"kind": "scripted", "prefix": [i + 1 for i in self.prefix], "n": self.n}


def validate_schedule_regular(schedule: Schedule, K: int, window_count: int, n: int | None = None) -> bool:
    """True iff every player is in every length-``K`` window of the first ``K*window_count`` periods."""
    if K < 1 or window_count < 1:
        raise ValueError("K and window_count must be positive")
    seq = schedule.materialize(K * window_count)
    if n is None:
        n = getattr(schedule, "n", None) or len(getattr(schedule, "order", [])) or (max(seq) + 1)
    players = set(range(n))
    for start in range(len(seq) - K + 1):
        if set(seq[start:start + K]) != players:
            return False
    return True


# ---------------------------------------------------------------- revision rules


@dataclass(frozen=True)
class DynamicSpec:
    """Revision rule.

    ``parameter`` is beta for BRAD and alpha for BRCD; the move uses
    ``step * parameter`` so ``step`` in [0, 1] picks a point of the allowed set.
    """

    kind: str = BRD
    parameter: float | Fraction = 0
    step: float | Fraction = 1
    overshoot: str = "alternating"

    def __post_init__(self):
        if self.kind not in (BRD, BRAD, BRCD):
            raise ConfigurationError(f"unknown dynamic {self.kind!r}")
        if not 0 <= self.parameter < 1:
            raise ConfigurationError("approach/centering parameter must lie in [0, 1)")
        if not 0 <= self.step <= 1:
            raise ConfigurationError("step fraction must lie in [0, 1]")
        if self.overshoot not in OVERSHOOT_RULES:
            raise ConfigurationError(f"overshoot rule must be one of {OVERSHOOT_RULES}")

    @classmethod
    def brd(cls):
        return cls(BRD)

    @classmethod
    def brad(cls, beta, step=1):
        return cls(BRAD, beta, step)

    @classmethod
    def brcd(cls, alpha, step=1, overshoot="alternating"):
        return cls(BRCD, alpha, step, overshoot)

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind != BRD:
            out.update(parameter=str(self.parameter), step=str(self.step))
        if self.kind == BRCD:
            out["overshoot"] = self.overshoot
        return out


def _coerce(value, exact: bool):
    return to_fraction(value) if exact else float(value)


def _revise(game: Game, x, i: int, spec: DynamicSpec, rng, update_index: int):
    """New value for coordinate ``i`` plus the best response and overshoot sign used."""
    b = best_response(game, x, i)
    if spec.kind == BRD:
        return b, b, 0
    exact = game.exact
    factor = _coerce(spec.step, exact) * _coerce(spec.parameter, exact)
    gap = x[i] - b
    if spec.kind == BRAD:
        return b + factor * gap, b, 0
    rule = spec.overshoot
    if rule == "+":
        s = 1
    elif rule == "-":
        s = -1
    elif rule == "alternating":
        s = 1 if update_index % 2 == 0 else -1
    else:
        if rng is None:
            raise ConfigurationError("random overshoot needs a generator")
        s = 1 if rng.random() < 0.5 else -1
    value = b + s * factor * abs(gap)
    return clamp(value, game.caps[i]), b, s


def step(game: Game, x, i: int, spec: DynamicSpec | None = None, rng=None, update_index: int = 0):
    """Profile after player ``i`` revises once."""
    spec = spec or DynamicSpec()
    new = np.array(x, dtype=object if game.exact else float, copy=True)
    new[i], _, _ = _revise(game, x, i, spec, rng, update_index)
    return new


def validate_update(x_before, x_after, i: int, b_value, kind: str, parameter=0, tol=None) -> bool:
    """Check the defining inequality of one revision.

    Profiles may be scalars (the revising coordinate) or full vectors, in which
    case all other coordinates must be unchanged.
    """
    if np.ndim(x_before):
        others = [k for k in range(len(x_before)) if k != i]
        if any(x_before[k] != x_after[k] for k in others):
            return False
        x, xn = x_before[i], x_after[i]
    else:
        x, xn = x_before, x_after
    if tol is None:
        tol = 0 if all(isinstance(v, (int, Fraction)) for v in (x, xn, b_value, parameter)) else 1e-12
    before, after = x - b_value, xn - b_value
    if kind == BRD:
        return abs(after) <= tol
    if kind == BRAD:
        if abs(after) > parameter * abs(before) + tol:
            return False
        return abs(after) <= tol or after * before > 0
    if kind == BRCD:
        return abs(after) <= parameter * abs(before) + tol
    raise ConfigurationError(f"unknown dynamic {kind!r}")


# ---------------------------------------------------------------- trajectories


@dataclass(frozen=True)
class UpdateRecord:
    period: int
    player: int
    profile: tuple
    best_response: object
    sign: int = 0
    potential: float | None = None


@dataclass(frozen=True)
class Converged:
    profile: tuple
    period: int
    name = "converged"


@dataclass(frozen=True)
class CycleCertified:
    entry: int
    length: int
    profile: tuple
    name = "cycle"


@dataclass(frozen=True)
class HorizonExhausted:
    period: int
    name = "horizon"


@dataclass
class Trajectory:
    """Initial profile, one record per update and a verdict.

    ``records[k]`` holds the profile after the update in period ``k``.
    """

    initial: tuple
    records: list = field(default_factory=list)
    verdict: object = None
    metadata: dict = field(default_factory=dict)

    def profiles(self) -> list[tuple]:
        return [self.initial] + [r.profile for r in self.records]

    @property
    def final(self) -> tuple:
        return self.records[-1].profile if self.records else self.initial

    def __len__(self):
        return len(self.records)


def _key(x, quantum):
    if quantum is None:
        return tuple(x)
    return tuple(int(round(float(v) / quantum)) for v in x)


class CycleDetector:
    """Online exact-revisit detector.

    A cycle is reported when the profile changes and lands on a profile seen
    before; the change guarantees a differing intermediate profile.
    """

    def __init__(self, initial, quantum=None):
        self.quantum = quantum
        self.first_seen = {_key(initial, quantum): 0}
        self.last = _key(initial, quantum)

    def observe(self, x, index: int):
        key = _key(x, self.quantum)
        if key == self.last:
            return None
        self.last = key
        if key in self.first_seen:
            entry = self.first_seen[key]
            return entry, index - entry
        self.first_seen[key] = index
        return None


def detect_cycle(trajectory_or_profiles, quantum=None):
    """First ``(entry, length)`` with ``x[entry] == x[entry + length]`` and a differing profile between."""
    if isinstance(trajectory_or_profiles, Trajectory):
        profiles = trajectory_or_profiles.profiles()
    else:
        profiles = list(trajectory_or_profiles)
    if not profiles:
        return None
    if quantum is None and not all(isinstance(v, Fraction) or isinstance(v, int) for v in profiles[0]):
        if any(isinstance(v, float) for v in profiles[0]):
            raise ConfigurationError("floating cycle detection needs a quantization grid")
    detector = CycleDetector(profiles[0], quantum)
    for k, x in enumerate(profiles[1:], start=1):
        hit = detector.observe(x, k)
        if hit:
            return hit
    return None


def _quantize(x, quantum: Fraction):
    return np.array([round(v / quantum) * quantum for v in x], dtype=object)


def _replay_quantized(game: Game, start, players, spec, signs, quantum) -> bool:
    """Replay ``players`` from ``start`` in exact arithmetic, re-quantizing each step."""
    g = game.to_exact()
    q = to_fraction(quantum)
    espec = DynamicSpec(spec.kind, to_fraction(spec.parameter), to_fraction(spec.step), "+")
    x0 = _quantize(start, q)
    x = x0.copy()
    for i, s in zip(players, signs):
        if espec.kind == BRCD:
            espec = DynamicSpec(BRCD, espec.parameter, espec.step, "+" if s >= 0 else "-")
        x = _quantize(step(g, x, i, espec), q)
    return all(a == b for a, b in zip(x, x0))


def run(game: Game, x0, schedule: Schedule, spec: DynamicSpec | None = None, horizon: int = 10_000,
        conv_tol=None, certify_cycles: bool | None = None, quantum=None, seed=None,
        potential: Callable | None = None) -> Trajectory:
    """Iterate the dynamic along ``schedule`` for at most ``horizon`` updates.

    Converged: the profile is a ``conv_tol``-equilibrium and every player has
    revised without moving more than ``conv_tol`` since the last larger move.
    CycleCertified: an exact (or quantized and replay-verified) revisit.
    """
    if horizon < 1:
        raise ConfigurationError("horizon must be at least 1")
    spec = spec or DynamicSpec()
    exact = game.exact
    if certify_cycles is None:
        certify_cycles = exact or quantum is not None
    if certify_cycles and not exact and quantum is None:
        raise ConfigurationError("cycle certification in floating mode requires a quantization grid")
    if conv_tol is None:
        conv_tol = 0 if exact else 1e-12
    x = game.profile(x0)
    rng = np.random.default_rng(seed) if (spec.kind == BRCD and spec.overshoot == "random") else None
    traj = Trajectory(initial=tuple(x), metadata={
        "spec": spec.describe(), "schedule": schedule.describe(), "seed": seed,
        "exact": exact, "horizon": horizon})
    detector = CycleDetector(x, None if exact else quantum) if certify_cycles else None
    quiet: set[int] = set()
    players = schedule.players()
    n = game.n
    for k in range(horizon):
        i = next(players)
        if not 0 <= i < n:
            raise ConfigurationError(f"schedule names player {i + 1}, game has {n}")
        value, b, s = _revise(game, x, i, spec, rng, k)
        moved = abs(value - x[i])
        x = x.copy()
        x[i] = value
        pot = potential(x) if potential is not None else None
        traj.records.append(UpdateRecord(k, i, tuple(x), b, s, pot))
        if moved > conv_tol:
            quiet = set()
        quiet.add(i)
        if detector is not None:
            hit = detector.observe(x, k + 1)
            if hit is not None:
                entry, length = hit
                if exact or _replay_quantized(
                        game, traj.profiles()[entry],
                        [r.player for r in traj.records[entry:entry + length]], spec,
                        [r.sign for r in traj.records[entry:entry + length]], quantum):
                    traj.verdict = CycleCertified(entry, length, tuple(x))
                    return traj
        if len(quiet) == n and is_nash(game, x, conv_tol):
            traj.verdict = Converged(tuple(x), k + 1)
            return traj
    traj.verdict = HorizonExhausted(horizon)
    return traj


def weighted_distance(x, y, a) -> float:
    """``max_i a_i |x_i - y_i|``: the maximum norm with weights ``1/a``."""
    return max(float(a[i]) * abs(float(x[i]) - float(y[i])) for i in range(len(a)))
