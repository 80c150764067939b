"""Exact checks of the determinant identities on group matrix elements.

Every check evaluates both sides on a :class:`~rank2lab.groups.GroupElement`
in rational arithmetic and returns the residual, which must be exactly zero.
Regular actions (``(X)_l f(G) = d/de f(e^{eX} G)``, ``(X)_r f(G) = d/de f(G e^{eX})``)
are evaluated as jet coefficients, so composite derivatives are exact too.

Word conventions (fixed package-wide)::

    alpha_w     = <f| G X-_{w1} X-_{w2} ... |f> / <f|G|f>,   f = last letter of w
    alpha_bar_w = <f| X+_{w1} X+_{w2} ... G |f> / <f|G|f>,   f = first letter of w

so that the hermitian conjugate of ``alpha_w`` is ``alpha_bar`` of the reversed word.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .groups import GroupElement, gauss_factor_random, identity
from .linalg import det, fraction_str
from .reps import Representation, pair
from .solutions import FieldPoint

THETA_VARIANTS = ("cartan", "literal")


class SingularDenominator(ZeroDivisionError):
    pass


# -- helpers -------------------------------------------------------------------

def _h(G: GroupElement, i: int) -> Fraction:
    return G.mats[i][0, 0]


def _require_regular(G: GroupElement) -> None:
    for i in G.reps:
        if _h(G, i) == 0:
            raise SingularDenominator(f"<{i}|G|{i}> = 0")


def _me(G: GroupElement, i, bra=(), ket=()) -> Fraction:
    rep = G.reps[i]
    return rep.bra(bra).dot(G.mats[i]).dot(rep.ket(ket))[0, 0]


def _cartan(G: GroupElement):
    rep = next(iter(G.reps.values()))
    return np.array([[2, -1], [-rep.p, 2]])


def _monomial(G: GroupElement, exps) -> Fraction:
    out = Fraction(1)
    for i, e in zip((1, 2), exps):
        out *= _h(G, i) ** int(e)
    return out


def _left(reps, seq, first_bit=1):
    """Left insertions for operators applied in ``seq`` order (innermost first)."""
    return {i: [(first_bit << k, reps[i].X("+", a)) for k, a in enumerate(seq)] for i in reps}


def _right(reps, seq, first_bit=1):
    return {i: [(first_bit << k, reps[i].X("-", a)) for k, a in enumerate(seq)] for i in reps}


# -- first and second Jacobi ---------------------------------------------------

def check_first_jacobi(G: GroupElement, j: int) -> Fraction:
    """``det[[<j|X+GX-|j>, <j|X+G|j>], [<j|GX-|j>, <j|G|j>]] - prod_{i!=j} <i|G|i>**(-K_ji)``."""
    _require_regular(G)
    K = _cartan(G)
    b = (j,)
    lhs = _me(G, j, b, b) * _me(G, j) - _me(G, j, b, ()) * _me(G, j, (), b)
    rhs = Fraction(1)
    for i in (1, 2):
        if i != j:
            rhs *= _h(G, i) ** int(-K[j - 1, i - 1])
    return lhs - rhs


def check_second_jacobi(G: GroupElement, i: int = 1, j: int = 2, barred: bool = True) -> Fraction:
    """``K_ij a_ji + K_ji a_ij + K_ij K_ji a_i a_j`` times ``<i|G|i><j|G|j>``.

    With ``i, j = 1, 2`` this is ``-(a21 + p a12 - p a1 a2)`` for the barred
    quantities and ``-(a12 + p a21 - p a1 a2)`` for the unbarred twin.
    """
    if i == j:
        raise ValueError("second Jacobi identity needs i != j")
    _require_regular(G)
    K = _cartan(G)
    kij, kji = int(K[i - 1, j - 1]), int(K[j - 1, i - 1])
    hi, hj = _h(G, i), _h(G, j)
    if barred:
        # numerators of alpha_bar_ji (bra word j i on |j>) and alpha_bar_ij
        n_ji, n_ij = _me(G, j, (j, i), ()), _me(G, i, (i, j), ())
        n_i, n_j = _me(G, i, (i,), ()), _me(G, j, (j,), ())
    else:
        # conjugate twin: alpha_ij (ket word i j on |j>) replaces alpha_bar_ji
        n_ji, n_ij = _me(G, j, (), (i, j)), _me(G, i, (), (j, i))
        n_i, n_j = _me(G, i, (), (i,)), _me(G, j, (), (j,))
    return kij * n_ji * hi + kji * n_ij * hj + kij * kji * n_i * n_j


# -- generalized Jacobi --------------------------------------------------------

def _minor_words(rep: Representation, s: int, bras=None, kets=None):
    kets = kets or [b.word for b in rep.basis[:s]]
    bras = bras or [tuple(reversed(w)) for w in kets]
    return bras, kets


def word_matrix_elements(G: GroupElement, i: int, bras, kets) -> np.ndarray:
    rep = G.reps[i]
    rows = np.vstack([rep.bra(b) for b in bras])
    cols = np.hstack([rep.ket(k) for k in kets])
    return rows.dot(G.mats[i]).dot(cols)


def minor(G: GroupElement, i: int, bras, kets) -> Fraction:
    return det(word_matrix_elements(G, i, bras, kets))


def leading_minors(m: np.ndarray) -> list:
    """All leading principal minors from one elimination without row exchanges."""
    a = [list(row) for row in m]
    n = len(a)
    out, acc = [], Fraction(1)
    for c in range(n):
        pv = a[c][c]
        if pv == 0:
            # a vanishing minor blocks pivot-free elimination; finish directly
            return out + [det(m[:s, :s]) for s in range(c + 1, n + 1)]
        acc *= pv
        out.append(acc)
        for r in range(c + 1, n):
            f = a[r][c]
            if f != 0:
                f = f / pv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return out


def minor_weight(rep: Representation, kets) -> tuple:
    """Cartan values of the minor: the summed weights of its ket basis."""
    weights = {b.word: b.weight for b in rep.basis}
    out = [0, 0]
    for w in kets:
        wt = weights.get(tuple(w))
        if wt is None:
            wt = _weight_of_word(rep, w)
        out[0] += wt[0]
        out[1] += wt[1]
    return tuple(out)


def _weight_of_word(rep: Representation, word) -> tuple:
    K = np.array([[2, -1], [-rep.p, 2]])
    w = list(rep.basis[0].weight)
    for a in word:
        for c in (0, 1):
            w[c] -= int(K[a - 1, c])
    return tuple(w)


@dataclass(frozen=True)
class MinorLaw:
    """``Min_s(G) = C * <1|G|1>**l1 * <2|G|2>**l2``."""
    constant: Fraction
    weight: tuple

    def __str__(self):
        parts = [fraction_str(self.constant)]
        parts += [f"<{i}|K|{i}>^{e}" for i, e in zip((1, 2), self.weight) if e]
        return " * ".join(parts)


def minor_law(rep_pair: dict, i: int, s: int | None = None, bras=None, kets=None) -> MinorLaw:
    """Weight by bookkeeping, constant by evaluation at the identity (never refit)."""
    rep = rep_pair[i]
    bras, kets = _minor_words(rep, s, bras, kets)
    return MinorLaw(minor(identity(rep_pair), i, bras, kets), minor_weight(rep, kets))


def check_generalized_jacobi(G: GroupElement, i: int, s: int | None = None,
                             bras=None, kets=None, law: MinorLaw | None = None) -> Fraction:
    """Residual of ``Min_s = C_s prod <k|G|k>**l_k`` (cleared of negative powers)."""
    _require_regular(G)
    rep = G.reps[i]
    bras, kets = _minor_words(rep, s, bras, kets)
    law = law or minor_law(G.reps, i, s, bras, kets)
    neg = tuple(max(0, -e) for e in law.weight)
    pos = tuple(max(0, e) for e in law.weight)
    return minor(G, i, bras, kets) * _monomial(G, neg) - law.constant * _monomial(G, pos)


def generalized_residuals(G: GroupElement, laws: dict) -> list:
    """Residuals for every leading principal minor in ``laws`` ((i, s) -> MinorLaw)."""
    _require_regular(G)
    out = []
    for i, rep in G.reps.items():
        words = [b.word for b in rep.basis]
        mins = leading_minors(word_matrix_elements(G, i, [tuple(reversed(w)) for w in words], words))
        for s, value in enumerate(mins, start=1):
            law = laws.get((i, s))
            if law is None:
                continue
            neg = tuple(max(0, -e) for e in law.weight)
            pos = tuple(max(0, e) for e in law.weight)
            out.append(value * _monomial(G, neg) - law.constant * _monomial(G, pos))
    return out


# -- alpha / theta -------------------------------------------------------------

STANDARD_WORDS = {
    "alpha": [(1,), (2,), (1, 2), (2, 1), (1, 1, 2), (1, 1, 1, 2), (1, 2, 1)],
    "alpha_bar": [(1,), (2,), (1, 2), (2, 1), (2, 1, 1), (2, 1, 1, 1), (1, 2, 1)],
}


@dataclass
class AlphaTheta:
    theta: dict                                   # j -> theta_j
    alpha: dict = field(default_factory=dict)     # word -> alpha_w
    alpha_bar: dict = field(default_factory=dict)  # word -> alpha_bar_w

    def to_dict(self) -> dict:
        key = lambda w: "".join(map(str, w))
        return {"theta": {str(j): fraction_str(v) for j, v in self.theta.items()},
                "alpha": {key(w): fraction_str(v) for w, v in self.alpha.items()},
                "alpha_bar": {key(w): fraction_str(v) for w, v in self.alpha_bar.items()}}


def compute_alpha_theta(G: GroupElement, words=None) -> AlphaTheta:
    _require_regular(G)
    words = words or STANDARD_WORDS
    pt = FieldPoint(G.mats, G.reps)
    out = AlphaTheta({j: pt.theta(j).value for j in (1, 2)})
    for w in words.get("alpha", ()):
        if _nonzero_word(G.reps, w, "ket"):
            out.alpha[tuple(w)] = pt.alpha(w).value
    for w in words.get("alpha_bar", ()):
        if _nonzero_word(G.reps, w, "bra"):
            out.alpha_bar[tuple(w)] = pt.alpha_bar(w).value
    return out


def _nonzero_word(reps, w, side) -> bool:
    if side == "ket":
        v = reps[w[-1]].ket(w)
    else:
        v = reps[w[0]].bra(w)
    return any(x != 0 for x in v.flat)


# -- Appendix I: differentiation rules ------------------------------------------

def appendix1_residuals(G: GroupElement, theta_variant: str = "cartan") -> dict:
    """All four rules for every (i, q); keys like ``"theta_r(i=1,q=2)"``."""
    _require_regular(G)
    K = _cartan(G)
    base = FieldPoint(G.mats, G.reps)
    out = {}
    for q in (1, 2):
        r = FieldPoint(G.mats, G.reps, right=_right(G.reps, (q,)))
        l = FieldPoint(G.mats, G.reps, left=_left(G.reps, (q,)))
        aq, abq = base.alpha((q,)).value, base.alpha_bar((q,)).value
        for i in (1, 2):
            th = base.theta(i, theta_variant).value
            kiq = int(K[i - 1, q - 1])
            delta = th if i == q else 0
            out[f"theta_r(i={i},q={q})"] = r.theta(i, theta_variant)[1] + th * kiq * aq
            out[f"theta_l(i={i},q={q})"] = l.theta(i, theta_variant)[1] + th * kiq * abq
            out[f"alpha_bar_r(i={i},q={q})"] = r.alpha_bar((i,))[1] - delta
            out[f"alpha_l(i={i},q={q})"] = l.alpha((i,))[1] - delta
    return out


@dataclass
class Appendix1Report:
    residuals: dict
    theta_variant: str

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.residuals.values())

    @property
    def failures(self) -> list:
        return [k for k, v in self.residuals.items() if v != 0]


def check_appendix1_rules(G: GroupElement, theta_variant: str = "cartan") -> Appendix1Report:
    return Appendix1Report(appendix1_residuals(G, theta_variant), theta_variant)


def discriminate_theta(algebra, seeds) -> dict:
    """Run the Appendix I rules under each theta_2 reading; returns variant -> failures."""
    reps = pair(algebra)
    out = {v: 0 for v in THETA_VARIANTS}
    for seed in seeds:
        G = regular_sample(reps, seed)
        for v in THETA_VARIANTS:
            if not check_appendix1_rules(G, v).passed:
                out[v] += 1
    return out


# -- Appendix II: G2 Det3 and the q table ---------------------------------------

# bra / ket words of the three-dimensional bases in fundamental 1.  The third
# bra is the transpose of the third ket, <1|X+1 X+2 X+1 X+1 X+2.
DET3_KETS = [(), (1,), (2, 1, 1, 2, 1)]
DET3_BRAS = [(), (1,), (1, 2, 1, 1, 2)]
# X+1 (2 X+2 X+1 - 3 X+1 X+2) on the bra side, (2 X-1 X-2 - 3 X-2 X-1) X-1 on the ket side
_DET3_LEFT = [(2, (1, 2, 1)), (-3, (1, 1, 2))]
_DET3_RIGHT = [(2, (1, 2, 1)), (-3, (2, 1, 1))]


def det3_quartic(G: GroupElement) -> Fraction:
    """``(right word)_r (left word)_l <1|G|1>**2`` with both words as written."""
    reps = G.reps
    tot = Fraction(0)
    for (cl, wl), (cr, wr) in product(_DET3_LEFT, _DET3_RIGHT):
        left = {i: [(1 << k, reps[i].X("+", a)) for k, a in enumerate(wl)] for i in reps}
        right = {i: [(1 << (3 + k), reps[i].X("-", a)) for k, a in enumerate(wr)] for i in reps}
        h = FieldPoint(G.mats, reps, left, right).me(1)
        tot += cl * cr * (h * h)[63]
    return tot


def check_appendix2_det3(G: GroupElement) -> Fraction:
    """``Det3 - ((1/16) quartic + <1|G|1>)``."""
    if G.algebra.p != 3:
        raise ValueError("the Det3 decomposition is a G2 statement")
    _require_regular(G)
    d3 = minor(G, 1, DET3_BRAS, DET3_KETS)
    return d3 - (det3_quartic(G) / 16 + _h(G, 1))


Q_CONSTANTS = ("d1", "d2", "d3", "d4", "d^2")


def q_line(pt: FieldPoint, d: dict, conj: bool = False):
    """``(q1, q2)`` as jets; ``conj`` builds the column ``qbar`` from alpha_bar and dbar.

    ``p^{22} = (p4, p3)`` and the multiplet is
    ``p1 = d1 + d^2 a1112/3, p2 = d2 + d^2 a112/3, p3 = d3 + 2 d^2 a12/3, p4 = d4 + 2 d^2 a2``.
    """
    a = (lambda w: pt.alpha_bar(tuple(reversed(w)))) if conj else pt.alpha
    d2 = Fraction(d["d^2"])
    p1 = d["d1"] + d2 / 3 * a((1, 1, 1, 2))
    p2 = d["d2"] + d2 / 3 * a((1, 1, 2))
    p3 = d["d3"] + 2 * d2 / 3 * a((1, 2))
    p4 = d["d4"] + 2 * d2 * a((2,))
    a1 = a((1,))
    return (p2 - 2 * p3 * a1 + p4 * a1 * a1,
            p1 - 2 * p2 * a1 + p3 * a1 * a1,
            (p1, p2, p3, p4))


def q_table_residuals(G: GroupElement, d: dict, theta_variant: str = "cartan") -> dict:
    """Left-action table on ``q1`` plus the annihilation of ``q_i`` / ``qbar_i`` by X+-2 / X-2.

    Operator sequences are applied innermost first: ``"X+2X+1 q1"`` means X+1 then X+2.
    """
    _require_regular(G)
    reps = G.reps
    d = {k: Fraction(v) for k, v in d.items()}
    base = FieldPoint(G.mats, reps)
    q1, _, (p1, p2, p3, p4) = q_line(base, d)
    a1 = base.alpha((1,)).value
    th1, th2 = base.theta(1, theta_variant).value, base.theta(2, theta_variant).value
    ab = lambda w: base.alpha_bar(w).value
    P = p4.value * a1 - p3.value
    P4 = p4.value
    expected = {
        (1,): 2 * th1 * P,
        (1, 2): 2 * th1 * ab((2,)) * P,
        (1, 1): 2 * th1 ** 2 * P4 - 4 * th1 * ab((1,)) * P,
        (1, 2, 1): 2 * th1 * (ab((2, 1)) - 2 * ab((1,)) * ab((2,))) * P + 2 * th1 ** 2 * ab((2,)) * P4,
        (1, 1, 2): (4 * th1 ** 2 * ab((2,)) * P4 + 4 * d["d^2"] * th1 ** 2 * th2
                    - 4 * th1 * ab((1,)) * ab((2,)) * P - 4 * th1 * ab((1, 2)) * P),
    }
    out = {}
    for seq, exp in expected.items():
        pt = FieldPoint(G.mats, reps, left=_left(reps, seq))
        got = q_line(pt, d)[0][(1 << len(seq)) - 1]
        name = "".join(f"X+{a}" for a in reversed(seq)) + " q1"
        out[name] = got - exp
    # X+2 P = 0 where P = p4 a1 - p3
    pt = FieldPoint(G.mats, reps, left=_left(reps, (2,)))
    _, _, (_, _, p3j, p4j) = q_line(pt, d)
    out["X+2 P"] = (p4j * pt.alpha((1,)) - p3j)[1]
    for k in (0, 1):
        out[f"X+2 q{k + 1}"] = q_line(pt, d)[k][1]
    dbar = {k: d.get(k + "bar", d[k]) for k in Q_CONSTANTS}
    ptr = FieldPoint(G.mats, reps, right=_right(reps, (2,)))
    for k in (0, 1):
        out[f"X-2 qbar{k + 1}"] = q_line(ptr, dbar, conj=True)[k][1]
    return out


# -- sampling and reports -----------------------------------------------------

def regular_sample(reps, seed: int, magnitude: int = 4, max_tries: int = 50) -> GroupElement:
    """Random Gauss-factored element with all <i|G|i> != 0 (singular draws are resampled)."""
    for k in range(max_tries):
        G = gauss_factor_random(reps, seed * 7919 + k, magnitude)
        if all(_h(G, i) != 0 for i in G.reps):
            return G
    raise SingularDenominator(f"no regular sample after {max_tries} draws (seed {seed})")


def random_q_constants(seed: int, magnitude: int = 5) -> dict:
    rng = random.Random(seed)
    out = {}
    for k in Q_CONSTANTS:
        out[k] = Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))
        out[k + "bar"] = Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))
    return out


def generalized_cases(algebra) -> list:
    """(fundamental, s) pairs covering every leading principal minor of both fundamentals."""
    reps = pair(algebra)
    return [(i, s) for i, rep in reps.items() for s in range(1, rep.dim + 1)]


def run_suite(algebra, trials: int = 100, seed: int = 0) -> list:
    """Run every identity check on ``trials`` samples; one report dict per identity."""
    reps = pair(algebra)
    p = next(iter(reps.values())).p
    cases = generalized_cases(algebra)
    laws = {(i, s): minor_law(reps, i, s) for i, s in cases}
    checks = {
        "first_jacobi": lambda G: [check_first_jacobi(G, j) for j in (1, 2)],
        "second_jacobi": lambda G: [check_second_jacobi(G, 1, 2, b) for b in (True, False)],
        "generalized_jacobi": lambda G: generalized_residuals(G, laws),
        "appendix1_rules": lambda G: list(appendix1_residuals(G).values()),
    }
    if p == 3:
        checks["appendix2_det3"] = lambda G: [check_appendix2_det3(G)]
    failures = {k: 0 for k in checks}
    qfail = 0
    for t in range(trials):
        G = regular_sample(reps, seed + t)
        for name, fn in checks.items():
            if any(r != 0 for r in fn(G)):
                failures[name] += 1
        if p == 3 and t < 20:
            if any(r != 0 for r in q_table_residuals(G, random_q_constants(seed + t)).values()):
                qfail += 1
    reports = [{"identity": k, "algebra": str(algebra), "trials": trials,
                "failures": v, "seed": seed} for k, v in failures.items()]
    if p == 3:
        reports.append({"identity": "appendix2_q_table", "algebra": str(algebra),
                        "trials": min(trials, 20), "failures": qfail, "seed": seed})
    theta = discriminate_theta(algebra, range(seed, seed + min(trials, 10)))
    reports.append({"identity": "theta2_variant", "algebra": str(algebra),
                    "trials": min(trials, 10), "failures": theta["cartan"], "seed": seed,
                    "variant_failures": theta,
                    "selected": min(THETA_VARIANTS, key=lambda v: theta[v])})
    return reports
