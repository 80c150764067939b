"""Exact group elements realised simultaneously in both fundamental representations.

A :class:`GroupElement` stores one matrix per fundamental (keyed by the
highest-vector root index, as everywhere in this package) built from the same
abstract parameters, so that identities relating ``<1|G|1>`` and ``<2|G|2>``
can be tested.  Random elements come from the Gauss decomposition
``N- . T . N+`` where ``N+-`` run over a reduced word of the longest Weyl
element (one exponential per positive root) and ``T`` is a torus element
``t1**h1 t2**h2``; all entries stay rational.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import det, eye, is_zero
from .reps import Representation, pair

# length of the longest Weyl element = number of positive roots
_LONGEST = {1: 3, 2: 4, 3: 6}


class NotNilpotent(ValueError):
    pass


class ZeroParameter(ValueError):
    pass


class InvalidWord(ValueError):
    pass


@dataclass(frozen=True)
class GroupElement:
    reps: dict       # highest index -> Representation
    mats: dict       # highest index -> matrix

    def __getitem__(self, i) -> np.ndarray:
        return self.mats[i]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.reps, {i: self.mats[i].dot(other.mats[i]) for i in self.mats})

    @property
    def algebra(self):
        return next(iter(self.reps.values())).algebra

    def is_invertible(self) -> bool:
        return all(det(m) != 0 for m in self.mats.values())


def _generator_sum(rep: Representation, terms) -> np.ndarray:
    """Matrix of ``sum coeff * X(sign, i)`` for terms ``(coeff, sign, i)``."""
    out = 0 * eye(rep.dim)
    for coeff, sign, i in terms:
        out = out + Fraction(coeff) * rep.X(sign, i)
    return out


def exp_matrix(m: np.ndarray) -> np.ndarray:
    """exp of a nilpotent matrix as the terminating series."""
    n = m.shape[0]
    out, term = eye(n), eye(n)
    for k in range(1, n + 1):
        term = term.dot(m) / k
        if is_zero(term):
            return out
        out = out + term
    raise NotNilpotent("series did not terminate by k = dim")


def exp_nilpotent(reps, terms) -> GroupElement:
    """``exp(sum coeff * X(sign, i))`` in every representation of ``reps``.

    ``terms`` is an iterable of ``(coeff, sign, i)``; a general matrix per
    representation may be passed instead as a dict ``{i: matrix}``.
    """
    reps = _as_reps(reps)
    if isinstance(terms, dict):
        return GroupElement(reps, {i: exp_matrix(terms[i]) for i in reps})
    terms = list(terms)
    return GroupElement(reps, {i: exp_matrix(_generator_sum(rep, terms)) for i, rep in reps.items()})


def torus_element(reps, t1, t2) -> GroupElement:
    """Diagonal ``t1**w1 * t2**w2`` on a basis vector of weight ``(w1, w2)``."""
    t1, t2 = Fraction(t1), Fraction(t2)
    if t1 == 0 or t2 == 0:
        raise ZeroParameter("torus parameters must be nonzero")
    reps = _as_reps(reps)
    mats = {}
    for i, rep in reps.items():
        m = eye(rep.dim)
        for k, b in enumerate(rep.basis):
            m[k, k] = t1 ** b.weight[0] * t2 ** b.weight[1]
        mats[i] = m
    return GroupElement(reps, mats)


def identity(reps) -> GroupElement:
    reps = _as_reps(reps)
    return GroupElement(reps, {i: eye(rep.dim) for i, rep in reps.items()})


def _rand_rational(rng: random.Random, magnitude: int, nonzero=False) -> Fraction:
    if magnitude <= 0:
        return Fraction(1 if nonzero else 0)
    while True:
        v = Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))
        if v != 0 or not nonzero:
            return v


def reduced_word(p: int) -> tuple:
    """Alternating reduced word of the longest Weyl element."""
    return tuple(1 + k % 2 for k in range(_LONGEST[p]))


def gauss_factor(reps, lower, torus, upper) -> GroupElement:
    """``prod exp(a_k X-_{w_k}) . T(t1, t2) . prod exp(b_k X+_{w_k})``."""
    reps = _as_reps(reps)
    word = reduced_word(next(iter(reps.values())).p)
    g = identity(reps)
    for a, i in zip(lower, word):
        g = g @ exp_nilpotent(reps, [(a, "-", i)])
    g = g @ torus_element(reps, *torus)
    for b, i in zip(upper, word):
        g = g @ exp_nilpotent(reps, [(b, "+", i)])
    return g


def gauss_factor_random(reps, seed: int, magnitude: int = 4) -> GroupElement:
    """Deterministic random Gauss-factored element; invertible by construction."""
    reps = _as_reps(reps)
    rng = random.Random(seed)
    n = _LONGEST[next(iter(reps.values())).p]
    lower = [_rand_rational(rng, magnitude) for _ in range(n)]
    torus = [_rand_rational(rng, magnitude, nonzero=True) for _ in range(2)]
    upper = [_rand_rational(rng, magnitude) for _ in range(n)]
    return gauss_factor(reps, lower, torus, upper)


def matrix_element(G: GroupElement, i: int, bra=(), ket=(), check=True):
    """``<i| X+_{bra...} G X-_{ket...} |i>`` with letters in written order."""
    rep = G.reps[i]
    b, k = rep.bra(bra), rep.ket(ket)
    if check and (is_zero(b) or is_zero(k)):
        raise InvalidWord(f"word {bra if is_zero(b) else ket} annihilates |{i}>")
    return b.dot(G.mats[i]).dot(k)[0, 0]


def act_regular(G: GroupElement, generator, side: str) -> GroupElement:
    """Left (``M G``) or right (``G M``) regular action of a generator.

    ``generator`` is ``(sign, i)``, ``("h", i)``, a list of ``(coeff, sign, i)``
    terms, or a dict of matrices keyed like ``G``.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    mats = {}
    for i, rep in G.reps.items():
        m = _generator_matrix(rep, generator, i)
        mats[i] = m.dot(G.mats[i]) if side == "left" else G.mats[i].dot(m)
    return GroupElement(G.reps, mats)


def _generator_matrix(rep, generator, i):
    if isinstance(generator, dict):
        return generator[i]
    if isinstance(generator, tuple) and len(generator) == 2:
        sign, k = generator
        return rep.h(k) if sign == "h" else rep.X(sign, k)
    return _generator_sum(rep, generator)


def _as_reps(reps) -> dict:
    if isinstance(reps, dict):
        return reps
    return pair(reps)
