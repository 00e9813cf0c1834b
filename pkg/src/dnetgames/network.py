"""Classification and diagonal rescaling of weight matrices.

A scaling vector ``a > 0`` turns ``W`` into ``V`` with ``v_ij = w_ij a_i / a_j``.
This module decides when some ``V`` is symmetric, row dominant (weak
influences) or column dominant (weak externalities), and builds the vector.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import absolute, as_vector, is_exact, sign, to_fraction
from .errors import ConvergenceError, IndeterminateError, NetGameError, PreconditionError, SizeError
from .game import Network

FLOAT_TOL = 1e-9
SPECTRAL_BAND = 1e-8
PERRON_ETA = 1e-12


def _weights(W) -> np.ndarray:
    if isinstance(W, Network):
        return W.weights
    if hasattr(W, "network"):
        return W.network.weights
    arr = np.asarray(W)
    return arr if arr.dtype == object else arr.astype(float)


def _tol(M, tol):
    if tol is not None:
        return tol
    return 0 if is_exact(M) else FLOAT_TOL


def _off_diagonal(M) -> np.ndarray:
    out = absolute(M)
    for i in range(out.shape[0]):
        out[i, i] = out[i, i] * 0
    return out


# ---------------------------------------------------------------- scaling vectors


@dataclass(frozen=True, eq=False)
class ScalingVector:
    """Strictly positive vector ``a``.

    ``squares`` optionally carries ``a_i**2`` exactly when the entries
    themselves are irrational (symmetrizing scalings are square roots).
    """

    values: np.ndarray
    squares: np.ndarray | None = None

    def __post_init__(self):
        values = self.values
        if not isinstance(values, np.ndarray):
            values = np.asarray(values)
            if values.dtype != object:
                values = values.astype(float)
        if values.ndim != 1 or len(values) == 0:
            raise ValueError("scaling vector must be a non-empty 1-d array")
        if not all(v > 0 for v in values):
            raise ValueError(f"scaling vector must be strictly positive: {values.tolist()}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.squares is not None:
            sq = np.array(self.squares, dtype=self.squares.dtype if isinstance(self.squares, np.ndarray) else object)
            sq.setflags(write=False)
            object.__setattr__(self, "squares", sq)

    @classmethod
    def ones(cls, n: int, exact: bool = False) -> "ScalingVector":
        return cls(as_vector([1] * n, exact), as_vector([1] * n, exact) if exact else None)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return is_exact(self.values)

    def squared(self) -> np.ndarray:
        if self.squares is not None:
            return self.squares
        return self.values * self.values

    def inverse(self) -> "ScalingVector":
        one = Fraction(1) if self.exact else 1.0
        inv_sq = None if self.squares is None else np.array([1 / s for s in self.squares], dtype=self.squares.dtype)
        return ScalingVector(np.array([one / v for v in self.values], dtype=self.values.dtype), inv_sq)

    def as_exact(self) -> "ScalingVector":
        """Exact copy; floating entries are read as their shortest decimal."""
        if self.exact:
            return self
        return ScalingVector(as_vector(self.values, True),
                             None if self.squares is None else as_vector(self.squares, True))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"ScalingVector({self.values.tolist()!r})"


@dataclass(frozen=True, eq=False)
class RescaledNetwork:
    base: Network
    scaling: ScalingVector
    weights: np.ndarray

    @property
    def network(self) -> Network:
        return Network(self.weights, exact=is_exact(self.weights))


def rescale(W, a) -> RescaledNetwork:
    """``v_ij = w_ij a_i / a_j``."""
    base = W if isinstance(W, Network) else Network(_weights(W), exact=is_exact(_weights(W)))
    scaling = a if isinstance(a, ScalingVector) else ScalingVector(a)
    M = base.weights
    s = scaling.values
    if is_exact(M) != is_exact(s):
        M = M.astype(float)
        s = s.astype(float)
    n = base.n
    V = np.empty((n, n), dtype=M.dtype)
    for i in range(n):
        for j in range(n):
            V[i, j] = M[i, j] * s[i] / s[j]
    for i in range(n):
        V[i, i] = M[i, i] if is_exact(M) else 1.0
    V.setflags(write=False)
    return RescaledNetwork(base, scaling, V)


# ---------------------------------------------------------------- symmetry


def is_sign_symmetric(W, tol=None) -> bool:
    M = _weights(W)
    tol = _tol(M, tol)
    n = M.shape[0]
    return all(sign(M[i, j], tol) == sign(M[j, i], tol) for i in range(n) for j in range(i + 1, n))


@dataclass(frozen=True, eq=False)
class RelativeImportanceMatrix:
    """``r_ij = w_ij / w_ji`` where both weights are nonzero."""

    values: np.ndarray
    defined: np.ndarray

    def __getitem__(self, key):
        i, j = key
        return self.values[i, j] if self.defined[i, j] else None


def relative_importance(W, tol=None) -> RelativeImportanceMatrix:
    M = _weights(W)
    tol = _tol(M, tol)
    exact = is_exact(M)
    n = M.shape[0]
    values = np.empty((n, n), dtype=object if exact else float)
    defined = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if abs(M[i, j]) > tol and abs(M[j, i]) > tol:
                values[i, j] = M[i, j] / M[j, i]
                defined[i, j] = True
            else:
                values[i, j] = None if exact else math.nan
    return RelativeImportanceMatrix(values, defined)


def _exact_sqrt(q: Fraction):
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def symmetrize(W, tol=None) -> ScalingVector | None:
    """Scaling vector making ``W`` symmetric, or None when none exists.

    Each component of the nonzero pattern is explored breadth-first from its
    lowest-indexed player; a player discovered from ``i`` gets
    ``a_j = a_i sqrt(|w_ij| / |w_ji|)``.  The result is then checked on every
    pair.  Squares are propagated so exact inputs are verified exactly.
    """
    M = _weights(W)
    exact = is_exact(M)
    tol = _tol(M, tol)
    n = M.shape[0]
    if not is_sign_symmetric(M, tol):
        return None
    squares = [None] * n
    one = Fraction(1) if exact else 1.0
    for root in range(n):
        if squares[root] is not None:
            continue
        squares[root] = one
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if j != i and squares[j] is None and abs(M[i, j]) > tol:
                    squares[j] = squares[i] * abs(M[i, j]) / abs(M[j, i])
                    queue.append(j)
    if exact:
        for k in range(n):
            for l in range(k + 1, n):
                if squares[k] * M[k, l] != squares[l] * M[l, k]:
                    return None
        roots = [_exact_sqrt(s) for s in squares]
        sq = as_vector(squares, True)
        if all(r is not None for r in roots):
            return ScalingVector(as_vector(roots, True), sq)
        return ScalingVector(np.array([math.sqrt(s) for s in squares]), sq)
    a = np.sqrt(np.array(squares, dtype=float))
    V = M * a[:, None] / a[None, :]
    if np.max(np.abs(V - V.T)) > tol:
        return None
    return ScalingVector(a, np.array(squares, dtype=float))


def symmetry_defect(W, a: ScalingVector):
    """``max_kl |a_k^2 w_kl - a_l^2 w_lk| / (a_k a_l)``; zero iff the rescale is symmetric."""
    M = _weights(W)
    s = a.squared()
    exact = is_exact(M) and is_exact(s)
    if exact:
        worst = Fraction(0)
        for k in range(M.shape[0]):
            for l in range(M.shape[0]):
                worst = max(worst, abs(s[k] * M[k, l] - s[l] * M[l, k]))
        return worst
    V = rescale(W, a).weights.astype(float)
    return float(np.max(np.abs(V - V.T)))


def brute_force_transitive(W, tol=None, max_players: int = 10) -> bool:
    """Check the forward/backward product identity on every simple cycle."""
    M = _weights(W)
    n = M.shape[0]
    if n > max_players:
        raise SizeError(f"cycle enumeration limited to {max_players} players, got {n}")
    exact = is_exact(M)
    tol = _tol(M, tol)
    for m in range(3, n + 1):
        for combo in itertools.combinations(range(n), m):
            first, rest = combo[0], combo[1:]
            for perm in itertools.permutations(rest):
                cycle = (first,) + perm
                if perm[0] > perm[-1]:
                    continue  # reversed traversal gives the same identity
                fwd = bwd = 1
                for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                    fwd = fwd * M[a, b]
                    bwd = bwd * M[b, a]
                if exact:
                    if fwd != bwd:
                        return False
                elif abs(fwd - bwd) > tol * max(1.0, abs(fwd), abs(bwd)):
                    return False
    return True


# ---------------------------------------------------------------- dominance


def off_diagonal_row_sums(W) -> np.ndarray:
    return _off_diagonal(_weights(W)).sum(axis=1)


def off_diagonal_column_sums(W) -> np.ndarray:
    return _off_diagonal(_weights(W)).sum(axis=0)


def is_weak_influences(W) -> bool:
    return all(s < 1 for s in off_diagonal_row_sums(W))


def is_weak_externalities(W) -> bool:
    return all(s < 1 for s in off_diagonal_column_sums(W))


def weighted_max_norm(obj, u):
    """Weighted maximum norm of a vector, or its induced norm for a matrix."""
    obj = np.asarray(obj) if not isinstance(obj, np.ndarray) else obj
    u = u.values if isinstance(u, ScalingVector) else u
    u = np.asarray(u) if not isinstance(u, np.ndarray) else u
    if not all(v > 0 for v in u):
        raise ValueError("weights must be strictly positive")
    if obj.ndim == 1:
        return max(abs(obj[i]) / u[i] for i in range(len(u)))
    n = obj.shape[0]
    return max(sum(u[j] * abs(obj[i, j]) for j in range(n)) / u[i] for i in range(n))


def contraction_factor(W, a):
    """``||W - I||`` in the weighted maximum norm with weights ``1/a``."""
    M = _weights(W)
    a = a if isinstance(a, ScalingVector) else ScalingVector(a)
    vals = a.values
    if is_exact(M) != is_exact(vals):
        M, vals = M.astype(float), vals.astype(float)
    D = M.copy()
    for i in range(D.shape[0]):
        D[i, i] = D[i, i] - 1
    one = Fraction(1) if is_exact(vals) else 1.0
    return weighted_max_norm(D, np.array([one / v for v in vals], dtype=vals.dtype))


@dataclass(frozen=True)
class SpectralEstimate:
    """Spectral radius of ``|W| - I`` with a bracket ``lower <= rho <= upper``."""

    value: float
    lower: float
    upper: float
    doublings: int
    cross_check: float | None = None

    @property
    def error_bound(self) -> float:
        return self.upper - self.lower

    def status(self, band: float = SPECTRAL_BAND) -> str:
        """``"below"`` if rho < 1 - band is certified, ``"not-below"`` if
        rho >= 1 - band is certified, else ``"indeterminate"``."""
        if self.upper < 1 - band:
            return "below"
        if self.lower >= 1 - band:
            return "not-below"
        return "indeterminate"


def _abs_minus_identity(W) -> np.ndarray:
    M = np.abs(np.array(_weights(W), dtype=float))
    np.fill_diagonal(M, 0.0)
    return M


def _perron_vector(M: np.ndarray, eta: float, iterations: int = 2000, tol: float = 1e-14):
    """Power iteration on ``I + M + eta*E``; returns (vector, eigenvalue estimate of M + eta*E)."""
    n = M.shape[0]
    P = np.eye(n) + M + eta
    u = np.ones(n) / n
    lam = 0.0
    for _ in range(iterations):
        y = P @ u
        s = y.sum()
        y /= s
        if np.max(np.abs(y - u)) <= tol * np.max(y):
            u = y
            break
        u = y
    lam = float(np.max(((M + eta) @ u) / u))
    return u, lam


def spectral_radius_abs(W, rel_tol: float = 1e-10, max_doublings: int = 200) -> SpectralEstimate:
    """``rho(|W| - I)`` from the Gelfand iterates ``||M^k||^(1/k)``, ``k = 2^j``.

    The upper end of the bracket is the smallest Gelfand iterate (of ``M`` and of
    ``I + M``, shifted back); the lower end combines the Collatz-Wielandt ratio
    at the power-iteration vector of ``M + eta E`` with the diagonal of
    ``(I + M)^k``.  Nilpotent matrices are detected exactly and give 0.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    M = _abs_minus_identity(W)
    n = M.shape[0]
    if not M.any():
        return SpectralEstimate(0.0, 0.0, 0.0, 0)
    Q = M.copy()
    for _ in range(n - 1):
        Q = Q @ M
        if not Q.any():
            return SpectralEstimate(0.0, 0.0, 0.0, 0)

    def normalized(A):
        s = float(np.max(A.sum(axis=1)))
        return A / s, math.log(s)

    B, log_b = normalized(M)
    P, log_p = normalized(np.eye(n) + M)
    k = 1
    estimate = math.exp(log_b)
    upper = min(estimate, math.exp(log_p) - 1)
    diag_lower = 0.0
    converged = False
    doublings = 0
    for doublings in range(1, max_doublings + 1):
        B = B @ B
        P = P @ P
        k *= 2
        sb = float(np.max(B.sum(axis=1)))
        sp = float(np.max(P.sum(axis=1)))
        if sb == 0.0:
            return SpectralEstimate(0.0, 0.0, 0.0, doublings)
        log_b = 2 * log_b + math.log(sb)
        log_p = 2 * log_p + math.log(sp)
        B /= sb
        P /= sp
        new = math.exp(log_b / k)
        upper = min(upper, new, math.exp(log_p / k) - 1)
        d = float(np.max(np.diag(P)))
        if d > 0:
            diag_lower = max(diag_lower, math.exp((math.log(d) + log_p) / k) - 1)
        if abs(new - estimate) <= rel_tol * max(new, 1e-300):
            estimate = new
            converged = True
            if upper - diag_lower <= max(10 * rel_tol * upper, 1e-14):
                break
            continue
        estimate = new
        converged = False
    if not converged:
        raise ConvergenceError(f"Gelfand iterates did not settle within {max_doublings} doublings")
    u, lam = _perron_vector(M, PERRON_ETA)
    cw_lower = float(np.min((M @ u) / u))
    lower = max(0.0, cw_lower, diag_lower)
    upper = max(upper, lower)
    estimate = min(max(estimate, lower), upper)
    return SpectralEstimate(estimate, lower, upper, doublings, cross_check=lam)


def _row_norm_weighted(M: np.ndarray, u: np.ndarray) -> float:
    return float(np.max((M @ u) / u))


def scaling_for_weak_influences(W, margin: float = SPECTRAL_BAND, eta: float = PERRON_ETA,
                                estimate: SpectralEstimate | None = None) -> ScalingVector | None:
    """Scaling ``a`` whose rescale has weak influences, or None if rho >= 1 - margin.

    ``a = 1/u`` for a positive ``u`` with ``||M||^u < 1``, ``M = |W| - I``; ``u``
    is the power-iteration vector of ``M + eta E`` with ``eta`` halved until the
    norm test passes.  A resolvent vector ``(I - M/theta)^-1 1`` is the fallback.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    est = estimate or spectral_radius_abs(W)
    status = est.status(margin)
    if status == "not-below":
        return None
    if status == "indeterminate":
        raise IndeterminateError(
            f"spectral radius in [{est.lower:.3g}, {est.upper:.3g}] is too close to 1")
    M = _abs_minus_identity(W)
    n = M.shape[0]
    u = None
    e = eta
    for _ in range(60):
        cand, _lam = _perron_vector(M, e)
        if np.all(cand > 0) and _row_norm_weighted(M, cand) < 1:
            u = cand
            break
        e /= 2
        if e < 1e-300:
            break
    if u is None:
        theta = (est.upper + 1) / 2
        cand = np.linalg.solve(np.eye(n) - M / theta, np.ones(n))
        if np.all(cand > 0) and _row_norm_weighted(M, cand) < 1:
            u = cand
    if u is None:
        raise NetGameError("could not build a dominance witness despite rho < 1")
    a = ScalingVector(1.0 / u)
    if not is_weak_influences(rescale(_as_float_network(W), a).weights):
        raise NetGameError("constructed scaling fails the weak-influences check")
    return a


def scaling_for_weak_externalities(W, margin: float = SPECTRAL_BAND, eta: float = PERRON_ETA,
                                   estimate: SpectralEstimate | None = None) -> ScalingVector | None:
    """Column-dominance witness: the weak-influences witness of ``W^T``, inverted."""
    Wt = _as_float_network(W).transpose()
    a_t = scaling_for_weak_influences(Wt, margin, eta, estimate)
    if a_t is None:
        return None
    a = ScalingVector(1.0 / a_t.values)
    if not is_weak_externalities(rescale(_as_float_network(W), a).weights):
        raise NetGameError("constructed scaling fails the weak-externalities check")
    return a


def _as_float_network(W) -> Network:
    M = _weights(W)
    return Network(np.array(M, dtype=float), exact=False)


def has_amplifying_link(W, tol=None) -> list[tuple[int, int]]:
    """Unordered pairs ``(i, j)``, ``i < j``, with ``|w_ij w_ji| >= 1``."""
    M = _weights(W)
    tol = _tol(M, tol)
    n = M.shape[0]
    return [(i, j) for i in range(n) for j in range(i + 1, n) if abs(M[i, j] * M[j, i]) >= 1 - tol]


# ---------------------------------------------------------------- acyclic networks


def dan_order(W, tol=None) -> list[int] | None:
    """Order making ``W`` lower triangular, or None if influences form a directed cycle.

    Kahn's algorithm on the graph with an edge ``j -> i`` whenever ``w_ij != 0``;
    ties go to the lowest original index.
    """
    M = _weights(W)
    tol = _tol(M, tol)
    n = M.shape[0]
    indegree = [0] * n
    out = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and abs(M[i, j]) > tol:
                out[j].append(i)
                indegree[i] += 1
    ready = [i for i in range(n) if indegree[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        j = heapq.heappop(ready)
        order.append(j)
        for i in out[j]:
            indegree[i] -= 1
            if indegree[i] == 0:
                heapq.heappush(ready, i)
    return order if len(order) == n else None


def dan_scaling(W, margin=1) -> ScalingVector:
    """Backward recursion ``a_j = margin * (1 + sum_{k after j} a_k |w_kj|)`` from ``a_last = 1``."""
    if margin < 1:
        raise ValueError("margin must be at least 1")
    M = _weights(W)
    order = dan_order(M)
    if order is None:
        raise PreconditionError("network has a directed cycle")
    exact = is_exact(M)
    margin = to_fraction(margin) if exact else float(margin)
    n = M.shape[0]
    a = [None] * n
    for pos in range(n - 1, -1, -1):
        j = order[pos]
        if pos == n - 1:
            a[j] = Fraction(1) if exact else 1.0
            continue
        total = sum((a[k] * abs(M[k, j]) for k in order[pos + 1:]), Fraction(0) if exact else 0.0)
        a[j] = margin * (1 + total)
    scaling = ScalingVector(as_vector(a, exact))
    for pos, j in enumerate(order):
        if not sum((scaling.values[k] * abs(M[k, j]) for k in order[pos + 1:]), 0) < scaling.values[j]:
            raise NetGameError("recursion violated the strict column inequality")
    return scaling


# ---------------------------------------------------------------- report


@dataclass
class ClassificationReport:
    n: int
    sign_symmetric: bool
    symmetrizable: bool
    symmetrize_witness: ScalingVector | None
    weak_influences: bool
    weak_externalities: bool
    influences_witness: ScalingVector | None
    externalities_witness: ScalingVector | None
    dan: bool
    dan_permutation: list[int] | None
    amplifying_links: list[tuple[int, int]]
    spectral: SpectralEstimate
    spectral_status: str
    boundary_rows: list[int] = field(default_factory=list)
    boundary_columns: list[int] = field(default_factory=list)

    @property
    def indeterminate(self) -> bool:
        return self.spectral_status == "indeterminate"


def classify(W, tol=None, band: float = SPECTRAL_BAND) -> ClassificationReport:
    M = _weights(W)
    sym = symmetrize(M, tol)
    est = spectral_radius_abs(M)
    status = est.status(band)
    inf_w = ext_w = None
    if status == "below":
        inf_w = scaling_for_weak_influences(M, band, estimate=est)
        ext_w = scaling_for_weak_externalities(M, band, estimate=spectral_radius_abs(M.T))
    order = dan_order(M, tol)
    rows = off_diagonal_row_sums(M)
    cols = off_diagonal_column_sums(M)
    return ClassificationReport(
        n=M.shape[0],
        sign_symmetric=is_sign_symmetric(M, tol),
        symmetrizable=sym is not None,
        symmetrize_witness=sym,
        weak_influences=is_weak_influences(M),
        weak_externalities=is_weak_externalities(M),
        influences_witness=inf_w,
        externalities_witness=ext_w,
        dan=order is not None,
        dan_permutation=order,
        amplifying_links=has_amplifying_link(M, tol),
        spectral=est,
        spectral_status=status,
        boundary_rows=[i for i, s in enumerate(rows) if s == 1],
        boundary_columns=[j for j, s in enumerate(cols) if s == 1],
    )
