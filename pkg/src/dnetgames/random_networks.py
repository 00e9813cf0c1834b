"""Random weight models and constructive best-response cycle witnesses.

Two cycle patterns are searched for:

* three groups of ``m`` players where each group is influenced (weight at
  least ``w_low``) by the previous one and does not influence it;
* a group of ``m`` players that benefit from one host (weight in
  ``[w_low, w_high]``) while harming it (weight at most ``-w_minus``).

Every witness carries a script that is replayed through the dynamics engine
in exact arithmetic before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binomtest

from .arith import UNBOUNDED, to_fraction
from .dynamics import CycleCertified, Cyclic, Trajectory, run
from .errors import PreconditionError
from .game import Game, Network

THREE_GROUP = "three-group"
PARASITE = "parasite"
EXHAUSTIVE_LIMIT = 12


@dataclass(frozen=True)
class WeightRange:
    """Uniform on ``[low, high]``; a point mass when the ends coincide."""

    low: float
    high: float

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError(f"empty weight range [{self.low}, {self.high}]")

    def draw(self, rng) -> float:
        return self.low if self.low == self.high else float(rng.uniform(self.low, self.high))


@dataclass(frozen=True)
class RandomWeightModel:
    """Independent, identically distributed pairs.

    With probability ``p_zero`` both weights are 0; with ``p_one_way`` one
    uniformly chosen direction carries a ``one_way`` weight and the other is
    0; with ``p_parasite`` a uniformly chosen player gets a ``host`` weight on
    its partner, who gets a ``parasite`` weight; otherwise both weights are
    uniform on ``[-generic_bound, generic_bound]``.
    """

    p_zero: float = 0.0
    p_one_way: float = 0.0
    p_parasite: float = 0.0
    w_minus: float = 1.0
    w_low: float = 1.0
    w_high: float | None = None
    one_way: WeightRange | None = None
    host: WeightRange | None = None
    parasite: WeightRange | None = None
    generic_bound: float = 1.0

    def __post_init__(self):
        masses = (self.p_zero, self.p_one_way, self.p_parasite)
        if any(p < 0 for p in masses) or sum(masses) > 1 + 1e-12:
            raise ValueError("mixture masses must be nonnegative with sum at most 1")
        if self.w_minus <= 0 or self.w_low <= 0:
            raise ValueError("w_minus and w_low must be positive")
        if self.w_high is not None and not self.w_low < self.w_high:
            raise ValueError("w_low must be below w_high")
        if self.p_parasite > 0 and self.w_high is None:
            raise ValueError("parasitic pairs need w_high")
        if self.one_way is None:
            object.__setattr__(self, "one_way", WeightRange(self.w_low, self.w_low))
        if self.host is None and self.w_high is not None:
            object.__setattr__(self, "host", WeightRange(self.w_low, self.w_high))
        if self.parasite is None:
            object.__setattr__(self, "parasite", WeightRange(-self.w_minus, -self.w_minus))
        if self.generic_bound < 0:
            raise ValueError("generic_bound must be nonnegative")

    @property
    def p_generic(self) -> float:
        return max(0.0, 1.0 - self.p_zero - self.p_one_way - self.p_parasite)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RandomWeightModel":
        data = dict(data)
        for key in ("one_way", "host", "parasite"):
            if data.get(key) is not None and not isinstance(data[key], WeightRange):
                value = data[key]
                data[key] = WeightRange(**value) if isinstance(value, dict) else WeightRange(*value)
        return cls(**data)


def _uniform_mass(lo: float, hi: float, bound: float) -> float:
    """Probability that a uniform draw on ``[-bound, bound]`` lands in ``[lo, hi]``."""
    if bound == 0:
        return 1.0 if lo <= 0 <= hi else 0.0
    lo, hi = max(lo, -bound), min(hi, bound)
    return max(0.0, hi - lo) / (2 * bound)


def _range_inside(r: WeightRange | None, lo: float, hi: float) -> bool:
    return r is not None and lo <= r.low and r.high <= hi


def model_probabilities(model: RandomWeightModel) -> tuple[float, float, float]:
    """``(P0, P1, P2)``: both-zero, one-way and parasitic probabilities of an ordered pair."""
    P0 = model.p_zero
    P1 = model.p_one_way / 2 if _range_inside(model.one_way, model.w_low, math.inf) else 0.0
    P2 = 0.0
    if model.w_high is not None:
        if _range_inside(model.host, model.w_low, model.w_high) and _range_inside(
                model.parasite, -math.inf, -model.w_minus):
            P2 = model.p_parasite / 2
        g = model.generic_bound
        P2 += model.p_generic * _uniform_mass(model.w_low, model.w_high, g) * _uniform_mass(
            -math.inf, -model.w_minus, g)
    return P0, P1, P2


def sample_network(model: RandomWeightModel, n: int, rng) -> Network:
    if n < 2:
        raise ValueError("need at least two players")
    W = np.eye(n)
    c1 = model.p_zero
    c2 = c1 + model.p_one_way
    c3 = c2 + model.p_parasite
    for i in range(n):
        for j in range(i + 1, n):
            u = rng.random()
            if u < c1:
                continue
            a, b = (i, j) if rng.random() < 0.5 else (j, i)
            if u < c2:
                W[a, b] = model.one_way.draw(rng)
            elif u < c3:
                W[a, b] = model.host.draw(rng)
                W[b, a] = model.parasite.draw(rng)
            else:
                W[i, j] = rng.uniform(-model.generic_bound, model.generic_bound)
                W[j, i] = rng.uniform(-model.generic_bound, model.generic_bound)
    return Network(W, exact=False)


def required_group_size(targets, w_low) -> int:
    """Smallest ``m`` with ``m * min(t) * w_low >= max(t)``."""
    t_lo, t_hi = to_fraction(min(targets)), to_fraction(max(targets))
    w = to_fraction(w_low)
    if w <= 0 or t_lo <= 0:
        raise PreconditionError("targets and w_low must be positive")
    return max(1, math.ceil(t_hi / (t_lo * w)))


def required_group_size_parasite(targets, w_minus, w_low, w_high) -> int:
    """Smallest ``m`` with ``max(t) - w_low min(t) < m w_low min(1, w_minus) z``, ``z = min(t) - w_high max(t)``."""
    t_lo, t_hi = to_fraction(min(targets)), to_fraction(max(targets))
    wm, wl, wh = to_fraction(w_minus), to_fraction(w_low), to_fraction(w_high)
    z = t_lo - wh * t_hi
    if z <= 0:
        raise PreconditionError("parasite pattern needs w_high * max(t) < min(t)")
    unit = wl * min(Fraction(1), wm) * z
    need = t_hi - wl * t_lo
    if need < 0:
        return 1
    return max(1, math.floor(need / unit) + 1)


# ---------------------------------------------------------------- witnesses


@dataclass
class CycleWitness:
    """A pattern plus the scripted schedule and profiles realizing the cycle (0-based)."""

    kind: str
    groups: tuple
    host: int | None
    schedule: list
    initial: tuple
    profiles: list = field(default_factory=list)

    def game(self, W, targets, caps=None) -> Game:
        n = len(targets)
        if caps is None:
            caps = [UNBOUNDED] * n
        return Game(Network(_weights(W), exact=True), targets, caps, exact=True)

    def replay(self, W, targets, caps=None) -> Trajectory:
        g = self.game(W, targets, caps)
        return run(g, self.initial, Cyclic(self.schedule), horizon=2 * len(self.schedule) + 1,
                   certify_cycles=True)

    def players(self) -> list[int]:
        out = [i for grp in self.groups for i in grp]
        if self.host is not None:
            out.append(self.host)
        return sorted(out)


def _weights(W) -> np.ndarray:
    if isinstance(W, Network):
        return W.weights
    return np.asarray(W)


def _three_group_script(groups, targets, n):
    I1, I2, I3 = groups
    t = [to_fraction(v) for v in targets]
    schedule = list(I3) + list(I1) + list(I2) + list(I3) + list(I1) + list(I2)
    x = [to_fraction(0)] * n
    for i in I1:
        x[i] = t[i]
    return schedule, tuple(x)


def _parasite_script(group, host, targets, n):
    t = [to_fraction(v) for v in targets]
    schedule = list(group) + [host] + list(group) + [host]
    x = [to_fraction(0)] * n
    x[host] = t[host]
    return schedule, tuple(x)


def _certifies(witness: CycleWitness, W, targets, caps) -> bool:
    traj = witness.replay(W, targets, caps)
    v = traj.verdict
    if isinstance(v, CycleCertified) and v.entry == 0 and v.length == len(witness.schedule):
        witness.profiles = traj.profiles()[: v.length + 1]
        return True
    return False


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.exhausted = False

    def tick(self) -> bool:
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            self.exhausted = True
        return not self.exhausted


def _three_group_candidates(zero, leads, n, m, order, budget):
    """Yield group triples; ``leads[x, y]``: y sits in the group after x's."""
    slots = [(g, p) for p in range(m) for g in range(3)]  # interleave groups for early pruning
    groups = [[], [], []]
    used = set()

    def ok(y, g):
        for x in groups[g]:
            if not zero[x, y]:
                return False
        for x in groups[(g - 1) % 3]:
            if not leads[x, y]:
                return False
        for x in groups[(g + 1) % 3]:
            if not leads[y, x]:
                return False
        return True

    def dfs(k):
        if k == len(slots):
            yield tuple(tuple(sorted(grp)) for grp in groups)
            return
        g, p = slots[k]
        for y in order:
            if y in used:
                continue
            if p > 0 and y < groups[g][-1]:
                continue
            if g > 0 and p == 0 and y < groups[0][0]:
                continue  # rotations of the three groups are equivalent
            if not budget.tick():
                return
            if not ok(y, g):
                continue
            groups[g].append(y)
            used.add(y)
            yield from dfs(k + 1)
            groups[g].pop()
            used.discard(y)
            if budget.exhausted:
                return

    yield from dfs(0)


def _search(candidates_fn, n, rng, restarts, node_cap):
    """Exhaustive search, or randomized restarts with a node cap for large ``n``."""
    if n <= EXHAUSTIVE_LIMIT:
        yield from candidates_fn(list(range(n)), _Budget(None))
        return
    budget = _Budget(node_cap * 10)
    yield from candidates_fn(list(range(n)), budget)
    if not budget.exhausted:
        return
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(restarts):
        order = list(rng.permutation(n))
        budget = _Budget(node_cap)
        yield from candidates_fn([int(i) for i in order], budget)


def find_three_group_witness(W, targets, w_low, m: int = 1, caps=None, rng=None,
                             restarts: int = 10_000, node_cap: int = 10_000) -> CycleWitness | None:
    """Disjoint groups ``I1, I2, I3`` of size ``m`` with zeros inside each group and,
    for consecutive groups ``(I_g, I_g+1)``, ``w_ab = 0`` and ``w_ba >= w_low``."""
    M = _weights(W)
    n = M.shape[0]
    if m < 1 or 3 * m > n:
        return None
    wl = to_fraction(w_low) if M.dtype == object else float(w_low)
    nz = np.array(M != 0, dtype=bool)
    zero = ~nz & ~nz.T
    leads = (~nz) & np.array(M.T >= wl, dtype=bool)  # leads[a, b]: w_ab == 0 and w_ba >= w_low
    np.fill_diagonal(zero, False)
    np.fill_diagonal(leads, False)
    seen = set()

    def candidates(order, budget):
        return _three_group_candidates(zero, leads, n, m, order, budget)

    for groups in _search(candidates, n, rng, restarts, node_cap):
        if groups in seen:
            continue
        seen.add(groups)
        schedule, initial = _three_group_script(groups, targets, n)
        witness = CycleWitness(THREE_GROUP, groups, None, schedule, initial)
        if _certifies(witness, M, targets, caps):
            return witness
    return None


def _clique_candidates(zero, pool, m, order, budget):
    rank = {y: k for k, y in enumerate(order)}
    pool = sorted(pool, key=rank.get)
    chosen = []

    def dfs(start):
        if len(chosen) == m:
            yield tuple(sorted(chosen))
            return
        for k in range(start, len(pool)):
            y = pool[k]
            if not budget.tick():
                return
            if all(zero[x, y] for x in chosen):
                chosen.append(y)
                yield from dfs(k + 1)
                chosen.pop()
                if budget.exhausted:
                    return

    yield from dfs(0)


def find_parasite_witness(W, targets, w_minus, w_low, w_high, m: int = 1, caps=None, rng=None,
                          restarts: int = 10_000, node_cap: int = 10_000) -> CycleWitness | None:
    """Group ``I1`` of size ``m`` and host ``j`` with ``w_ij`` in ``[w_low, w_high]``,
    ``w_ji <= -w_minus`` for every ``i`` in ``I1`` and zeros inside ``I1``."""
    M = _weights(W)
    n = M.shape[0]
    if m < 1 or m + 1 > n:
        return None
    conv = to_fraction if M.dtype == object else float
    wm, wl, wh = conv(w_minus), conv(w_low), conv(w_high)
    nz = np.array(M != 0, dtype=bool)
    zero = ~nz & ~nz.T
    np.fill_diagonal(zero, False)
    seen = set()

    def candidates(order, budget):
        for j in order:
            pool = [i for i in range(n) if i != j and wl <= M[i, j] <= wh and M[j, i] <= -wm]
            if len(pool) < m:
                continue
            for grp in _clique_candidates(zero, pool, m, order, budget):
                yield grp, j
            if budget.exhausted:
                return

    for grp, j in _search(candidates, n, rng, restarts, node_cap):
        if (grp, j) in seen:
            continue
        seen.add((grp, j))
        schedule, initial = _parasite_script(grp, j, targets, n)
        witness = CycleWitness(PARASITE, (grp,), j, schedule, initial)
        if _certifies(witness, M, targets, caps):
            return witness
    return None


# ---------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class FrequencyRow:
    n: int
    trials: int
    hits: int
    three_group_hits: int
    parasite_hits: int
    frequency: float
    ci_low: float
    ci_high: float
    standard_error: float


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(hits, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def wilson_standard_error(hits: int, trials: int) -> float:
    """Half-width of the one-sigma Wilson interval."""
    lo, hi = wilson_interval(hits, trials, confidence=math.erf(1 / math.sqrt(2)))
    return (hi - lo) / 2


def three_group_lower_bound(P0: float, P1: float, m: int, n: int) -> float:
    """``1 - (1 - P0^(3m(m-1)/2) P1^(3m^2))^floor(n / 3m)``."""
    q = P0 ** (3 * m * (m - 1) / 2) * P1 ** (3 * m * m)
    return 1 - (1 - q) ** (n // (3 * m))


def trial_rng(seed: int, n: int, trial: int):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, trial)))


def estimate_cycle_probability(model: RandomWeightModel, targets, n_values, trials: int, seed: int = 0,
                               m: int | None = None, m_parasite: int | None = None) -> list[FrequencyRow]:
    """Fraction of sampled networks admitting either witness, per ``n``.

    ``targets`` is a scalar (all players) or a callable ``n -> vector``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rows = []
    for n in n_values:
        t = targets(n) if callable(targets) else [targets] * n
        mm = m if m is not None else required_group_size(t, model.w_low)
        mp = m_parasite
        if mp is None and model.w_high is not None:
            try:
                mp = required_group_size_parasite(t, model.w_minus, model.w_low, model.w_high)
            except PreconditionError:
                mp = None
        hits = tg = ps = 0
        for trial in range(trials):
            rng = trial_rng(seed, n, trial)
            W = sample_network(model, n, rng).weights
            found = find_three_group_witness(W, t, model.w_low, mm, rng=rng) is not None
            if found:
                tg += 1
            elif mp is not None:
                if find_parasite_witness(W, t, model.w_minus, model.w_low, model.w_high, mp, rng=rng):
                    ps += 1
                    found = True
            hits += found
        lo, hi = wilson_interval(hits, trials)
        rows.append(FrequencyRow(n, trials, hits, tg, ps, hits / trials, lo, hi,
                                 wilson_standard_error(hits, trials)))
    return rows
