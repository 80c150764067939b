"""Small dense linear algebra over ``Fraction`` (numpy object arrays)."""
from __future__ import annotations

from fractions import Fraction

import numpy as np


def fmat(rows) -> np.ndarray:
    return np.array([[Fraction(v) for v in row] for row in rows], dtype=object)


def zeros(n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    out = np.empty((n, m), dtype=object)
    out.fill(Fraction(0))
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_zero(a: np.ndarray) -> bool:
    return all(v == 0 for v in a.flat)


def comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a.dot(b) - b.dot(a)


def det(a) -> Fraction:
    """Determinant by Gaussian elimination; works for any exact field."""
    m = [list(row) for row in np.asarray(a, dtype=object)]
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign = 1
    result = None
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return m[0][0] * 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        result = pv if result is None else result * pv
        for r in range(col + 1, n):
            f = m[r][col]
            if f != 0:
                f = f / pv
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return result * sign


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return np.array([row[n:] for row in m], dtype=object)


def rank(rows) -> int:
    """Rank by fraction-free (Bareiss-style) elimination on integer-scaled rows."""
    m = [[Fraction(v) for v in row] for row in rows]
    if not m:
        return 0
    r = 0
    ncols = len(m[0])
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][col] != 0:
                a, b = m[r][col], m[i][col]
                m[i] = [a * x - b * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def nilpotency_index(a: np.ndarray) -> int | None:
    """Smallest k with a**k == 0, or None if a is not nilpotent."""
    n = a.shape[0]
    power = a
    for k in range(1, n + 1):
        if is_zero(power):
            return k
        power = power.dot(a)
    return None


def fraction_str(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def parse_fraction(s) -> Fraction:
    return Fraction(s)
