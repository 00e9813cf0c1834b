"""Dual arithmetic helpers.

Floating data lives in ``float64`` arrays, exact data in ``object`` arrays of
:class:`fractions.Fraction`.  Everything downstream is written against plain
array arithmetic so both representations share one code path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

UNBOUNDED = math.inf


def to_fraction(value) -> Fraction:
    """Convert ``value`` to a Fraction.

    Floats go through their shortest repr, so ``0.9`` becomes ``9/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        return Fraction(int(value))
    if isinstance(value, (int, np.integer, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot represent {value!r} exactly")
    return Fraction(repr(value))


def is_exact(arr) -> bool:
    return isinstance(arr, np.ndarray) and arr.dtype == object


def as_vector(values, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(len(values), dtype=object)
        for k, v in enumerate(values):
            out[k] = v if (isinstance(v, float) and math.isinf(v)) else to_fraction(v)
        return out
    return np.array([float(v) for v in values], dtype=float)


def as_matrix(rows, exact: bool) -> np.ndarray:
    rows = [list(r) for r in rows]
    n = len(rows)
    if exact:
        out = np.empty((n, len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                out[i, j] = to_fraction(v)
        return out
    return np.array(rows, dtype=float)


def to_float(arr) -> np.ndarray:
    return np.array(arr, dtype=float)


def zero(exact: bool):
    return Fraction(0) if exact else 0.0


def one(exact: bool):
    return Fraction(1) if exact else 1.0


def sign(value, tol=0) -> int:
    if value > tol:
        return 1
    if value < -tol:
        return -1
    return 0


def absolute(arr) -> np.ndarray:
    return np.abs(arr) if not is_exact(arr) else np.vectorize(abs, otypes=[object])(arr)


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=arr.dtype, copy=True)
    arr.setflags(write=False)
    return arr


def format_number(value, exact: bool) -> str:
    """17 significant digits in floating mode, ``p/q`` in exact mode."""
    if isinstance(value, float) and math.isinf(value):
        return "unbounded"
    if exact:
        return str(to_fraction(value))
    return f"{float(value):.17g}"


def solve_linear(A: np.ndarray, rhs: np.ndarray, tol: float = 1e-12):
    """Gaussian elimination with partial pivoting for either representation.

    Returns ``(x, status)`` where status is ``"unique"``, ``"continuum"`` (singular
    and consistent; ``x`` is one particular solution) or ``"inconsistent"``
    (``x`` is None).
    """
    exact = is_exact(A)
    n = A.shape[0]
    if n == 0:
        return rhs.copy(), "unique"
    M = np.array(A, dtype=object if exact else float, copy=True)
    b = np.array(rhs, dtype=object if exact else float, copy=True)
    scale = 0.0 if exact else max(1.0, float(np.max(np.abs(M))))
    pivots = []
    row = 0
    for col in range(n):
        if exact:
            pivot_row = next((r for r in range(row, n) if M[r, col] != 0), None)
        else:
            r = row + int(np.argmax(np.abs(M[row:, col]))) if row < n else None
            pivot_row = r if r is not None and abs(M[r, col]) > tol * scale else None
        if pivot_row is None:
            continue
        if pivot_row != row:
            M[[row, pivot_row]] = M[[pivot_row, row]]
            b[[row, pivot_row]] = b[[pivot_row, row]]
        for r in range(n):
            if r != row and M[r, col] != 0:
                f = M[r, col] / M[row, col]
                M[r, col:] = M[r, col:] - f * M[row, col:]
                b[r] = b[r] - f * b[row]
        pivots.append(col)
        row += 1
        if row == n:
            break
    # rows beyond the rank must have a zero right-hand side
    rhs_scale = 0.0 if exact else max(1.0, float(np.max(np.abs(b))))
    for r in range(row, n):
        if (b[r] != 0) if exact else (abs(b[r]) > tol * scale * rhs_scale):
            return None, "inconsistent"
    x = np.array([zero(exact)] * n, dtype=object if exact else float)
    for r, col in enumerate(pivots):
        x[col] = b[r] / M[r, col]
    return x, ("unique" if len(pivots) == n else "continuum")
