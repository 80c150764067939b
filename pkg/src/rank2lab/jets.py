"""Truncated multivariate jets: the ring F[e1..en] / (e_i**2).

Every derivative in this package is a coefficient of such a jet.  A group
element moved along ``K -> (1 + e A) K (1 + e' B)`` yields matrix elements
whose ``e``/``e'``/``e e'`` coefficients are the left/right regular actions
and their composite; with ``A = L+`` and ``B = L-`` these are the y-, x-
and mixed derivatives of the general solution.

Masks are integer bitsets over the nilpotent generators.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np


def _submasks(mask):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        if coeffs is None:
            coeffs = {}
        elif not isinstance(coeffs, dict):
            coeffs = {0: coeffs}
        self.c = {m: v for m, v in coeffs.items() if v != 0}

    @classmethod
    def const(cls, v):
        return cls({0: v})

    @property
    def value(self):
        return self.c.get(0, 0)

    def __getitem__(self, mask):
        return self.c.get(mask, 0)

    def masks(self):
        return set(self.c)

    def __repr__(self):
        return f"Jet({self.c!r})"

    @staticmethod
    def _lift(other):
        return other if isinstance(other, Jet) else Jet.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.c)
        for m, v in other.c.items():
            out[m] = out.get(m, 0) + v
        return Jet(out)

    __radd__ = __add__

    def __neg__(self):
        return Jet({m: -v for m, v in self.c.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet({m: v * other for m, v in self.c.items()})
        out = {}
        for m1, v1 in self.c.items():
            for m2, v2 in other.c.items():
                if m1 & m2 == 0:
                    m = m1 | m2
                    out[m] = out.get(m, 0) + v1 * v2
        return Jet(out)

    __rmul__ = __mul__

    def _nil_degree(self):
        return bin(self.support()).count("1")

    def support(self):
        s = 0
        for m in self.c:
            s |= m
        return s

    def apply(self, derivs: Callable[[object, int], list]):
        """``f(self)`` via Taylor expansion; ``derivs(a, n)`` returns f^(k)(a), k<=n."""
        a = self.value
        nil = Jet({m: v for m, v in self.c.items() if m != 0})
        n = nil._nil_degree()
        ds = derivs(a, n)
        out = Jet.const(ds[0])
        power = Jet.const(1)
        for k in range(1, n + 1):
            power = power * nil
            if not power.c:
                break
            out = out + power * (ds[k] / math.factorial(k))
        return out

    def reciprocal(self):
        def derivs(a, n):
            out, f = [], 1 / a
            for k in range(n + 1):
                out.append(f)
                f = -(k + 1) * f / a
            return out
        return self.apply(derivs)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet({m: v / other for m, v in self.c.items()})
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, e):
        if isinstance(e, int):
            if e < 0:
                return (self ** (-e)).reciprocal()
            out = Jet.const(1)
            base = self
            while e:
                if e & 1:
                    out = out * base
                base = base * base
                e >>= 1
            return out
        return self.rpow(e)

    def rpow(self, e, power: Callable | None = None):
        """Real power with exponent ``e``; ``power(a, e)`` evaluates a**e."""
        power = power or (lambda a, ex: a ** ex)

        def derivs(a, n):
            out, coef = [], 1
            for k in range(n + 1):
                out.append(coef * power(a, e - k))
                coef = coef * (e - k)
            return out
        return self.apply(derivs)

    def is_zero(self):
        return not self.c

    def __eq__(self, other):
        other = self._lift(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.c.items())))


def log_jet(j: Jet, log=None) -> Jet:
    """Natural logarithm; ``log`` evaluates the constant term (math.log by default)."""
    log = log or math.log

    def derivs(a, n):
        out = [log(a)]
        f = 1 / a
        for k in range(1, n + 1):
            out.append(f)
            f = -k * f / a
        return out
    return j.apply(derivs)


class JetMatrix:
    """A group element displaced by first-order left and right factors.

    ``left`` and ``right`` are lists of ``(bit, matrix)``; the displaced element is
    ``(1 + e_l1 A_1)(1 + e_l2 A_2)... K ...(1 + e_r1 B_1)(1 + e_r2 B_2)``.
    """

    def __init__(self, K, left=(), right=()):
        self.K = K
        self.left = list(left)
        self.right = list(right)
        self._row_cache: dict = {}
        self._col_cache: dict = {}

    def _row(self, bra_key, bra, mask):
        key = (bra_key, mask)
        if key not in self._row_cache:
            v = bra
            for bit, a in self.left:
                if mask & bit:
                    v = v.dot(a)
            self._row_cache[key] = v
        return self._row_cache[key]

    def _col(self, ket_key, ket, mask):
        key = (ket_key, mask)
        if key not in self._col_cache:
            v = ket
            for bit, b in reversed(self.right):
                if mask & bit:
                    v = b.dot(v)
            self._col_cache[key] = v
        return self._col_cache[key]

    def element(self, bra, ket, bra_key=None, ket_key=None) -> Jet:
        lmask = sum(b for b, _ in self.left)
        rmask = sum(b for b, _ in self.right)
        bra_key = tuple(bra.flat) if bra_key is None else bra_key
        ket_key = tuple(ket.flat) if ket_key is None else ket_key
        out = {}
        for lm in _submasks(lmask):
            row = self._row(bra_key, bra, lm)
            if not _nonzero(row):
                continue
            rowk = row.dot(self.K)
            for rm in _submasks(rmask):
                col = self._col(ket_key, ket, rm)
                out[lm | rm] = rowk.dot(col)[0, 0]
        return Jet(out)


def _nonzero(v):
    return any(x != 0 for x in np.asarray(v).flat)


# -- small matrices of jets -------------------------------------------------

def jdet2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def jinv2(m):
    d = jdet2(m)
    inv = d.reciprocal() if isinstance(d, Jet) else 1 / d
    return [[m[1][1] * inv, -m[0][1] * inv], [-m[1][0] * inv, m[0][0] * inv]]


def jmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Jet()) for j in range(m)] for i in range(n)]


def jadd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def jsub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def jscale(a, s):
    return [[x * s for x in row] for row in a]


def jmap(a, f):
    return [[f(x) for x in row] for row in a]


def part(a, mask):
    """Coefficient of ``mask`` in each entry of a jet matrix."""
    return [[x[mask] if isinstance(x, Jet) else (x if mask == 0 else 0) for x in row] for row in a]


def derivative(j, bit):
    """Differentiate along generator ``bit``: keeps the coefficients of masks containing it."""
    if isinstance(j, list):
        return [[derivative(x, bit) for x in row] for row in j]
    if not isinstance(j, Jet):
        return Jet()
    return Jet({m & ~bit: v for m, v in j.c.items() if m & bit})


def exact_zero(v) -> bool:
    return v == 0 or v == Fraction(0)
