"""Fundamental representations built from the lowering orbit of the highest vector.

Vectors of the Verma module are dicts ``word -> Fraction`` where the word
``(i1, ..., ik)`` stands for ``X-_{i1} ... X-_{ik} |hw>``.  Raising operators
are pushed through with ``[X+_i, X-_j] = delta_ij h_j`` and the contravariant
(Shapovalov) form picks the irreducible quotient: a candidate vector with
zero norm after orthogonalisation lies in the radical and is dropped.

The resulting basis is orthogonal but not normalised (norms are rational,
their square roots generally are not); ``X-_i`` is the adjoint of ``X+_i``
with respect to the diagonal form ``diag(norms)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .algebra import AlgebraId, GradingSpec, as_algebra, cartan_matrix
from .linalg import comm, fraction_str, is_zero, nilpotency_index, zeros

CLASSICAL_DIMS = {
    ("A2", 1): 3, ("A2", 2): 3,
    ("B2", 1): 5, ("B2", 2): 4,
    ("C2", 1): 4, ("C2", 2): 5,
    ("G2", 1): 7, ("G2", 2): 14,
}

GENERATORS = ("h1", "h2", "Xp1", "Xp2", "Xm1", "Xm2")


class InternalInconsistency(RuntimeError):
    pass


class AlgebraMismatch(ValueError):
    pass


@dataclass(frozen=True)
class WeightWord:
    word: tuple
    weight: tuple


@dataclass
class Representation:
    algebra: AlgebraId
    fundamental: int
    highest: int
    basis: list
    norms: list
    mats: dict = field(repr=False)
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def p(self) -> int:
        return self.algebra.p

    def X(self, sign: str, i: int) -> np.ndarray:
        return self.mats[("Xp" if sign == "+" else "Xm") + str(i)]

    def h(self, i: int) -> np.ndarray:
        return self.mats[f"h{i}"]

    def hw_ket(self) -> np.ndarray:
        v = zeros(self.dim, 1)
        v[0, 0] = Fraction(1)
        return v

    def hw_bra(self) -> np.ndarray:
        v = zeros(1, self.dim)
        v[0, 0] = Fraction(1)
        return v

    def ket(self, word=()) -> np.ndarray:
        """Column vector ``X-_{w1} X-_{w2} ... |hw>`` (letters in written order)."""
        v = self.hw_ket()
        for i in reversed(tuple(word)):
            v = self.X("-", i).dot(v)
        return v

    def bra(self, word=()) -> np.ndarray:
        """Row vector ``<hw| X+_{w1} X+_{w2} ...`` (letters in written order)."""
        v = self.hw_bra()
        for i in word:
            v = v.dot(self.X("+", i))
        return v

    def basis_bra(self, k: int) -> np.ndarray:
        v = zeros(1, self.dim)
        v[0, k] = Fraction(self.norms[k])
        return v

    def basis_ket(self, k: int) -> np.ndarray:
        v = zeros(self.dim, 1)
        v[k, 0] = Fraction(1)
        return v


def _weight_of(hw, cartan, word):
    w = list(hw)
    for i in word:
        for k in range(2):
            w[k] -= cartan[i - 1, k]
    return tuple(w)


def build_fundamental(algebra, j: int) -> Representation:
    """Exact matrices of the ``j``-th fundamental representation."""
    alg = as_algebra(algebra)
    cartan = cartan_matrix(alg)
    top = alg.highest_index(j)
    hw = (int(top == 1), int(top == 2))
    bound = CLASSICAL_DIMS[(alg.name, j)]

    @lru_cache(maxsize=None)
    def raise_word(i, word):
        # X+_i applied to the word vector, as a tuple of (word, coeff)
        if not word:
            return ()
        a, rest = word[0], word[1:]
        out = {}
        for w, c in raise_word(i, rest):
            key = (a,) + w
            out[key] = out.get(key, 0) + c
        if a == i:
            wt = _weight_of(hw, cartan, rest)[i - 1]
            if wt:
                out[rest] = out.get(rest, 0) + Fraction(wt)
        return tuple((w, c) for w, c in out.items() if c != 0)

    @lru_cache(maxsize=None)
    def form_words(w1, w2):
        if len(w1) != len(w2):
            return Fraction(0)
        vec = {w2: Fraction(1)}
        for i in w1:
            nxt = {}
            for w, c in vec.items():
                for w_, c_ in raise_word(i, w):
                    nxt[w_] = nxt.get(w_, 0) + c * c_
            vec = {w: c for w, c in nxt.items() if c != 0}
        return vec.get((), Fraction(0))

    def form(v1, v2):
        return sum((c1 * c2 * form_words(w1, w2)
                    for (w1, c1), (w2, c2) in product(v1.items(), v2.items())),
                   Fraction(0))

    def lower(i, v):
        return {(i,) + w: c for w, c in v.items()}

    labels = [()]
    vectors = [{(): Fraction(1)}]
    norms = [Fraction(1)]
    level = [0]
    while level:
        candidates = sorted(((i,) + labels[k], k, i) for k in level for i in (1, 2))
        new_level = []
        for label, k, i in candidates:
            if label in labels:
                continue
            wt = _weight_of(hw, cartan, label)
            vec = lower(i, vectors[k])
            for m in new_level:
                if _weight_of(hw, cartan, labels[m]) == wt:
                    coef = form(vectors[m], vec) / norms[m]
                    if coef:
                        for w, c in vectors[m].items():
                            vec[w] = vec.get(w, 0) - coef * c
                        vec = {w: c for w, c in vec.items() if c != 0}
            nrm = form(vec, vec)
            if nrm == 0:
                continue
            if nrm < 0:
                raise InternalInconsistency(f"negative norm for word {label}")
            labels.append(label)
            vectors.append(vec)
            norms.append(nrm)
            new_level.append(len(labels) - 1)
            if len(labels) > bound:
                raise InternalInconsistency(
                    f"orbit of {alg.name} fundamental {j} exceeded dimension {bound}")
        level = new_level

    n = len(labels)
    if n != bound:
        raise InternalInconsistency(f"{alg.name} fundamental {j}: got dim {n}, expected {bound}")
    weights = [_weight_of(hw, cartan, lab) for lab in labels]
    mats = {}
    for i in (1, 2):
        h = zeros(n)
        for k in range(n):
            h[k, k] = Fraction(weights[k][i - 1])
        mats[f"h{i}"] = h
        xm = zeros(n)
        xp = zeros(n)
        for k in range(n):
            lowered = lower(i, vectors[k])
            for m in range(n):
                if len(labels[m]) == len(labels[k]) + 1:
                    xm[m, k] = form(vectors[m], lowered) / norms[m]
        for k in range(n):
            for m in range(n):
                # adjointness: norms[m] Xp[m,k] = norms[k] Xm[k,m]
                xp[m, k] = norms[k] * xm[k, m] / norms[m]
        mats[f"Xm{i}"] = xm
        mats[f"Xp{i}"] = xp
    basis = [WeightWord(lab, wt) for lab, wt in zip(labels, weights)]
    return Representation(alg, j, top, basis, norms, mats)


_CACHE: dict = {}


def fundamental_for_highest(algebra, highest: int) -> Representation:
    """Cached representation whose highest vector is ``|highest>`` in root indexing."""
    alg = as_algebra(algebra)
    j = highest if alg.name != "B2" else 3 - highest
    key = (alg.name, j)
    if key not in _CACHE:
        _CACHE[key] = build_fundamental(alg, j)
    return _CACHE[key]


def pair(algebra) -> dict:
    """Both fundamentals keyed by highest-vector root index ``{1: rep, 2: rep}``."""
    return {i: fundamental_for_highest(algebra, i) for i in (1, 2)}


@dataclass
class RelationReport:
    ok: bool
    checked: list
    failed: str | None = None

    def __bool__(self):
        return self.ok


def verify_relations(rep: Representation, p: int | None = None) -> RelationReport:
    """Check every defining commutation relation exactly.

    ``p`` defaults to the algebra's own value; passing another value checks
    the matrices against a different algebra's relations.
    """
    p = rep.p if p is None else p
    m = rep.mats
    rels = [
        ("[Xp1,Xm1]=h1", comm(m["Xp1"], m["Xm1"]), m["h1"]),
        ("[Xp2,Xm2]=h2", comm(m["Xp2"], m["Xm2"]), m["h2"]),
        ("[Xp1,Xm2]=0", comm(m["Xp1"], m["Xm2"]), 0 * m["h1"]),
        ("[Xp2,Xm1]=0", comm(m["Xp2"], m["Xm1"]), 0 * m["h1"]),
        ("[h1,h2]=0", comm(m["h1"], m["h2"]), 0 * m["h1"]),
    ]
    for s, sign in (("p", 1), ("m", -1)):
        rels += [
            (f"[h1,X{s}1]={2 * sign:+d}X{s}1", comm(m["h1"], m[f"X{s}1"]), 2 * sign * m[f"X{s}1"]),
            (f"[h2,X{s}2]={2 * sign:+d}X{s}2", comm(m["h2"], m[f"X{s}2"]), 2 * sign * m[f"X{s}2"]),
            (f"[h1,X{s}2]={-p * sign:+d}X{s}2", comm(m["h1"], m[f"X{s}2"]), -p * sign * m[f"X{s}2"]),
            (f"[h2,X{s}1]={-sign:+d}X{s}1", comm(m["h2"], m[f"X{s}1"]), -sign * m[f"X{s}1"]),
        ]
    checked = []
    for name, lhs, rhs in rels:
        if not is_zero(lhs - rhs):
            return RelationReport(False, checked, name)
        checked.append(name)
    return RelationReport(True, checked)


def grading_matrix(rep: Representation, grading: GradingSpec, algebra=None) -> np.ndarray:
    if algebra is not None and as_algebra(algebra).p != rep.p:
        raise AlgebraMismatch(f"grading for {algebra} applied to {rep.algebra} representation")
    a, b = grading.coeffs
    return a * rep.h(1) + b * rep.h(2)


def nilpotency(rep: Representation) -> dict:
    return {name: nilpotency_index(rep.mats[name]) for name in ("Xp1", "Xp2", "Xm1", "Xm2")}


# -- JSON persistence -------------------------------------------------------

def rep_to_dict(rep: Representation) -> dict:
    out = {
        "algebra": rep.algebra.name,
        "fundamental": rep.fundamental,
        "dim": rep.dim,
        "basis": [{"word": list(b.word), "weight": list(b.weight)} for b in rep.basis],
        "norms": [fraction_str(v) for v in rep.norms],
    }
    for name in GENERATORS:
        out[name] = [[fraction_str(v) for v in row] for row in rep.mats[name]]
    return out


def rep_from_dict(data: dict) -> Representation:
    alg = AlgebraId(data["algebra"])
    j = int(data["fundamental"])
    basis = [WeightWord(tuple(b["word"]), tuple(b["weight"])) for b in data["basis"]]
    mats = {name: np.array([[Fraction(v) for v in row] for row in data[name]], dtype=object)
            for name in GENERATORS}
    if len(basis) != int(data["dim"]):
        raise ValueError("basis length does not match dim")
    norms = [Fraction(v) for v in data.get("norms", ["1"] * len(basis))]
    return Representation(alg, j, alg.highest_index(j), basis, norms, mats)


def dump_rep(rep: Representation, path) -> None:
    with open(path, "w") as fh:
        json.dump(rep_to_dict(rep), fh, indent=1)
        fh.write("\n")


def load_rep(path) -> Representation:
    with open(path) as fh:
        return rep_from_dict(json.load(fh))
