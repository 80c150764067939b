"""Graded operators L+ / L- for the five nonabelian-grading systems.

A Lie word is a nested tuple: ``("g", "+", i)`` is X+_i and ``("c", a, b)``
is the commutator ``[a, b]``.  L+ is written exactly as printed, with its
numerical prefactors and bracket nesting; L- is its "hermitian conjugate"
(generator words transposed, barred and unbarred coefficient names swapped).
Coefficients are polynomials with rational coefficients in one variable:
unbarred names depend on x and sit in L-, barred names depend on y and sit
in L+.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import grading
from .linalg import comm, zeros
from .reps import Representation, grading_matrix, pair


class UnknownCoefficient(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class GradeViolation(AssertionError):
    pass


class SingularGauge(ValueError):
    pass


def X(sign, i):
    return ("g", sign, i)


def C(a, b):
    return ("c", a, b)


P1, P2 = X("+", 1), X("+", 2)


@dataclass(frozen=True)
class LaxTerm:
    coeff: str
    factor: Fraction
    word: tuple


@dataclass(frozen=True)
class SystemSpec:
    name: str
    algebra: str
    c: tuple
    lplus: tuple            # LaxTerms with barred coefficient names
    grades: tuple           # grades present in L+
    u_root: int             # red root whose 2-dim block carries u

    @property
    def coeff_names(self):
        return tuple(unbar(t.coeff) for t in self.lplus)

    @property
    def all_coeff_names(self):
        return self.coeff_names + tuple(t.coeff for t in self.lplus)

    @property
    def grading(self):
        return grading(self.algebra, self.c)


def bar(name: str) -> str:
    return name[0] + "bar" + name[1:] if "bar" not in name else name


def unbar(name: str) -> str:
    return name.replace("bar", "", 1)


def swap_bar(name: str) -> str:
    return unbar(name) if "bar" in name else bar(name)


def _t(coeff, factor, word):
    return LaxTerm(coeff, Fraction(factor), word)


SYSTEMS = {
    "A2-10": SystemSpec("A2-10", "A2", (1, 0), (
        _t("cbar1", 1, P1),
        _t("cbar2", 1, C(P2, P1)),
    ), (1,), 2),
    "B2-10": SystemSpec("B2-10", "B2", (1, 0), (
        _t("cbar1", 1, P1),
        _t("cbar2", 1, C(P2, P1)),
        _t("cbar^2", 1, C(C(P2, P1), P1)),
    ), (1, 2), 2),
    "B2-01": SystemSpec("B2-01", "B2", (0, 1), (
        _t("dbar1", 1, P2),
        _t("dbar2", 1, C(P1, P2)),
        _t("dbar3", Fraction(1, 2), C(P1, C(P1, P2))),
    ), (1,), 1),
    "G2-01": SystemSpec("G2-01", "G2", (0, 1), (
        _t("dbar1", 1, P2),
        _t("dbar2", 1, C(P1, P2)),
        _t("dbar3", Fraction(1, 2), C(P1, C(P1, P2))),
        _t("dbar4", Fraction(1, 6), C(P1, C(P1, C(P1, P2)))),
        _t("dbar^2", Fraction(1, 3), C(P2, C(P1, C(P1, C(P1, P2))))),
    ), (1, 2), 1),
    "G2-10": SystemSpec("G2-10", "G2", (1, 0), (
        _t("cbar1", 1, P1),
        _t("cbar2", 1, C(P1, P2)),
        _t("cbar^2", 1, C(P1, C(P1, P2))),
        _t("cbar^3_1", 1, C(P1, C(P1, C(P1, P2)))),
        _t("cbar^3_2", 1, C(P2, C(P1, C(P1, C(P1, P2))))),
    ), (1, 2, 3), 2),
}


def system_spec(system) -> SystemSpec:
    if isinstance(system, SystemSpec):
        return system
    try:
        return SYSTEMS[system]
    except KeyError:
        raise ValueError(f"unknown system {system!r}; expected one of {sorted(SYSTEMS)}") from None


# -- formal words -------------------------------------------------------------

def transpose_word(word):
    if word[0] == "g":
        return ("g", "-" if word[1] == "+" else "+", word[2])
    # [a, b]^T = [b^T, a^T]
    return ("c", transpose_word(word[2]), transpose_word(word[1]))


def hermitian_conjugate(terms):
    """Transpose every generator word and swap barred/unbarred coefficient names."""
    return tuple(LaxTerm(swap_bar(t.coeff), t.factor, transpose_word(t.word)) for t in terms)


def word_matrix(word, rep: Representation) -> np.ndarray:
    if word[0] == "g":
        return rep.X(word[1], word[2])
    key = ("word", word)
    if key not in rep.cache:
        rep.cache[key] = comm(word_matrix(word[1], rep), word_matrix(word[2], rep))
    return rep.cache[key]


def word_str(word) -> str:
    if word[0] == "g":
        return f"X{word[1]}{word[2]}"
    return f"[{word_str(word[1])},{word_str(word[2])}]"


def word_grade(word, c) -> int:
    if word[0] == "g":
        g = c[word[2] - 1]
        return g if word[1] == "+" else -g
    return word_grade(word[1], c) + word_grade(word[2], c)


# -- coefficients ---------------------------------------------------------------

@dataclass
class CoefficientSet:
    """Named polynomial coefficients (lists of Fractions, lowest degree first)."""
    system: str
    polys: dict
    Azero: dict = field(default_factory=dict)
    Bzero: dict = field(default_factory=dict)

    def __post_init__(self):
        spec = system_spec(self.system)
        allowed = set(spec.all_coeff_names)
        for name in self.polys:
            if name not in allowed:
                raise UnknownCoefficient(f"{name!r} is not a coefficient of {spec.name}")
        self.polys = {k: [Fraction(c) for c in (v if isinstance(v, (list, tuple)) else [v])]
                      for k, v in self.polys.items()}
        for name in spec.all_coeff_names:
            self.polys.setdefault(name, [Fraction(0)])
        for zero in (self.Azero, self.Bzero):
            for k in list(zero):
                zero[k] = [Fraction(c) for c in (zero[k] if isinstance(zero[k], (list, tuple)) else [zero[k]])]

    def value(self, name, at):
        return poly_eval(self.polys[name], at)

    def constant(self, name) -> Fraction:
        return self.polys[name][0]

    @property
    def is_constant(self) -> bool:
        return all(all(c == 0 for c in p[1:]) for p in self.polys.values())

    @property
    def has_grade_zero(self) -> bool:
        return any(any(c != 0 for c in p) for z in (self.Azero, self.Bzero) for p in z.values())

    def echo(self) -> dict:
        out = {k: [str(c) for c in v] for k, v in sorted(self.polys.items())}
        if self.Azero:
            out["Azero"] = {k: [str(c) for c in v] for k, v in sorted(self.Azero.items())}
        if self.Bzero:
            out["Bzero"] = {k: [str(c) for c in v] for k, v in sorted(self.Bzero.items())}
        return out

    @classmethod
    def constants(cls, system, values: dict):
        return cls(system, {k: [Fraction(v)] for k, v in values.items()})


def poly_eval(coeffs, at):
    out = 0 * at
    for c in reversed(coeffs):
        out = out * at + c
    return out


def load_coefficients(path) -> CoefficientSet:
    if str(path).endswith(".toml"):
        try:
            import tomllib  # type: ignore[import-not-found]
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    else:
        with open(path) as fh:
            data = json.load(fh)
    spec = system_spec(data["system"])
    missing = [n for n in spec.all_coeff_names if n not in data["coeffs"]]
    if missing:
        raise UnknownCoefficient(f"coefficient file for {spec.name} is missing {', '.join(missing)}")
    return CoefficientSet(data["system"], dict(data["coeffs"]),
                          dict(data.get("Azero") or {}), dict(data.get("Bzero") or {}))


def random_constants(system, rng, magnitude=5, zero=()) -> CoefficientSet:
    spec = system_spec(system)
    vals = {}
    for name in spec.all_coeff_names:
        if name in zero:
            vals[name] = Fraction(0)
            continue
        num = 0
        while num == 0:
            num = rng.randint(-magnitude, magnitude)
        vals[name] = Fraction(num, rng.randint(1, magnitude))
    return CoefficientSet.constants(system, vals)


# -- assembled operators ----------------------------------------------------------

@dataclass
class LaxData:
    system: str
    Lplus: dict     # highest index -> matrix
    Lminus: dict
    Azero: dict
    Bzero: dict


def assemble(terms, values: dict, rep: Representation) -> np.ndarray:
    out = zeros(rep.dim)
    for t in terms:
        v = values[t.coeff]
        if v != 0:
            out = out + (v * t.factor) * word_matrix(t.word, rep)
    return out


def grade_zero_matrix(spec: dict, at, rep: Representation, sign) -> np.ndarray:
    out = zeros(rep.dim)
    for name, poly in spec.items():
        v = poly_eval(poly, at)
        if name in ("h1", "h2"):
            out = out + v * rep.h(int(name[1]))
        elif name[:2] in ("Xp", "Xm"):
            out = out + v * rep.X("+" if name[1] == "p" else "-", int(name[2]))
        else:
            raise UnknownCoefficient(f"grade-zero component {name!r}")
    return out


def check_grade_zero(system, zero: dict):
    spec = system_spec(system)
    for name in zero:
        if name[:2] in ("Xp", "Xm") and int(name[2]) not in spec.grading.red:
            raise GradeViolation(f"{name} is not in the zero-graded subalgebra of {spec.name}")


def build_lax(system, coeffs: CoefficientSet, reps=None, x=0, y=0) -> LaxData:
    """Matrices of L+ (at ``y``) and L- (at ``x``) in both fundamentals."""
    spec = system_spec(system)
    reps = reps or pair(spec.algebra)
    lminus_terms = hermitian_conjugate(spec.lplus)
    vals_y = {t.coeff: coeffs.value(t.coeff, y) for t in spec.lplus}
    vals_x = {t.coeff: coeffs.value(t.coeff, x) for t in lminus_terms}
    check_grade_zero(spec, coeffs.Azero)
    check_grade_zero(spec, coeffs.Bzero)
    lp, lm, a0, b0 = {}, {}, {}, {}
    for i, rep in reps.items():
        lp[i] = assemble(spec.lplus, vals_y, rep)
        lm[i] = assemble(lminus_terms, vals_x, rep)
        a0[i] = grade_zero_matrix(coeffs.Azero, x, rep, "-")
        b0[i] = grade_zero_matrix(coeffs.Bzero, y, rep, "+")
    return LaxData(spec.name, lp, lm, a0, b0)


def grade_components(mat: np.ndarray, H: np.ndarray) -> dict:
    """Split ``mat`` into eigen-components of ad(H) (H diagonal)."""
    n = mat.shape[0]
    out: dict = {}
    for r in range(n):
        for c in range(n):
            if mat[r, c] != 0:
                g = H[r, r] - H[c, c]
                out.setdefault(g, zeros(n))[r, c] = mat[r, c]
    return out


def check_grading(system, lax: LaxData, reps=None) -> None:
    spec = system_spec(system)
    reps = reps or pair(spec.algebra)
    allowed = set(spec.grades)
    for i, rep in reps.items():
        H = grading_matrix(rep, spec.grading)
        for sign, mat in ((1, lax.Lplus[i]), (-1, lax.Lminus[i])):
            for g in grade_components(mat, H):
                if sign * g not in allowed:
                    raise GradeViolation(f"{spec.name}: component of grade {g} in L{'+' if sign > 0 else '-'}")


def gauge_transform(u, g, gbar):
    """``gbar(y) . u . g(x)`` for 2x2 matrices (plain or jet entries)."""
    from .jets import jdet2, jmul
    for m in (g, gbar):
        d = jdet2(m)
        if (d.is_zero() if hasattr(d, "is_zero") else d == 0):
            raise SingularGauge("gauge matrix is singular")
    return jmul(jmul(gbar, u), g)


# -- row actions on the red-root basis (G2, (1,0) grading) -------------------------

def _row_word(rep: Representation, prefix, poly):
    """``<hw| X+_{prefix} (sum c * X+_{word})`` for ``poly = [(c, word), ...]``."""
    out = zeros(1, rep.dim)
    for c, w in poly:
        out = out + c * rep.bra(tuple(prefix) + tuple(w))
    return out


def g2_10_row_actions(values: dict, rep: Representation | None = None) -> dict:
    """Residuals of the closed forms of ``<2|L+`` and ``<2|X+2 L+`` in the 14-dim representation.

    ``<2|L+      = <2|X+2 X+1 (-cb2 + cb^2 X+1 - cb3_1 X+1X+1 + cb3_2 (2X+1X+1X+2 - 3X+1X+2X+1))``
    ``<2|X+2 L+  = <2|X+2 X+1 [cb1 + cb^2 X+1X+2 + (X+1X+1X+2 - 3X+1X+2X+1)(cb3_1 - cb3_2 X+2)]``
    """
    rep = rep or pair("G2")[2]
    spec = SYSTEMS["G2-10"]
    v = {k: Fraction(values.get(k, 0)) for k in spec.all_coeff_names if "bar" in k}
    Lp = assemble(spec.lplus, v, rep)
    cb1, cb2, cb_2, c31, c32 = (v["cbar1"], v["cbar2"], v["cbar^2"], v["cbar^3_1"], v["cbar^3_2"])
    first = _row_word(rep, (2, 1), [(-cb2, ()), (cb_2, (1,)), (-c31, (1, 1)),
                                    (2 * c32, (1, 1, 2)), (-3 * c32, (1, 2, 1))])
    second = _row_word(rep, (2, 1), [(cb1, ()), (cb_2, (1, 2)), (c31, (1, 1, 2)), (-3 * c31, (1, 2, 1)),
                                     (-c32, (1, 1, 2, 2)), (3 * c32, (1, 2, 1, 2))])
    return {"<2|L+": rep.bra(()).dot(Lp) - first, "<2|X+2 L+": rep.bra((2,)).dot(Lp) - second}
