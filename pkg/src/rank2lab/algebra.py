"""Cartan data and gradings for the rank-2 algebras A2, B2, C2, G2.

All four algebras are described by a single integer ``p`` (1, 2, 3); the
commutation relations are

    [h1, X2(+-)] = -+ p X2(+-),     [h2, X1(+-)] = -+ X1(+-)

so the Cartan matrix is ``[[2, -1], [-p, 2]]`` with the convention
``[h_i, X_j(+-)] = +- K[j][i] X_j(+-)``.  B2 and C2 share ``p = 2`` and
differ only in which highest weight is called the "first" fundamental
representation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

ALGEBRA_P = {"A2": 1, "B2": 2, "C2": 2, "G2": 3}


class UnknownAlgebra(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraId:
    name: str

    def __post_init__(self):
        if self.name not in ALGEBRA_P:
            raise UnknownAlgebra(
                f"unknown algebra {self.name!r}; expected one of {sorted(ALGEBRA_P)}")

    @property
    def p(self) -> int:
        return ALGEBRA_P[self.name]

    def highest_index(self, fundamental: int) -> int:
        """Simple-root index ``i`` with ``h_i |hw> = |hw>`` for the given label.

        B2 labels are swapped relative to C2: the first fundamental
        representation of B2 is the vector (5-dim) one, whose highest weight
        is dual to the second simple root.
        """
        if fundamental not in (1, 2):
            raise ValueError(f"fundamental index must be 1 or 2, got {fundamental}")
        if self.name == "B2":
            return 3 - fundamental
        return fundamental

    def __str__(self):
        return self.name


def as_algebra(algebra) -> AlgebraId:
    return algebra if isinstance(algebra, AlgebraId) else AlgebraId(str(algebra))


@dataclass(frozen=True)
class CartanMatrix:
    entries: tuple  # 2x2 ints
    inverse: tuple  # 2x2 Fractions

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def p(self) -> int:
        return -self.entries[1][0]


def cartan_matrix(algebra) -> CartanMatrix:
    p = as_algebra(algebra).p
    entries = ((2, -1), (-p, 2))
    det = Fraction(4 - p)
    inverse = ((Fraction(2) / det, Fraction(1) / det),
               (Fraction(p) / det, Fraction(2) / det))
    return CartanMatrix(entries, inverse)


@dataclass(frozen=True)
class GradingSpec:
    c: tuple
    coeffs: tuple

    @property
    def black(self):
        """Simple roots carrying grade 1."""
        return tuple(i + 1 for i, ci in enumerate(self.c) if ci == 1)

    @property
    def red(self):
        return tuple(i + 1 for i, ci in enumerate(self.c) if ci == 0)


def grading_coeffs(cartan: CartanMatrix, c) -> tuple:
    """Solve ``K x = c``; the grading operator is ``H = x1 h1 + x2 h2``."""
    c = tuple(int(v) for v in c)
    if len(c) != 2 or any(v not in (0, 1) for v in c):
        raise ValueError(f"grading column must be a 0/1 pair, got {c}")
    inv = cartan.inverse
    return tuple(inv[i][0] * c[0] + inv[i][1] * c[1] for i in range(2))


def grading(algebra, c) -> GradingSpec:
    c = tuple(int(v) for v in c)
    return GradingSpec(c, grading_coeffs(cartan_matrix(algebra), c))
