"""The five integrable systems as residual functionals on solution data.

Each ``residual_*`` function takes a :class:`~rank2lab.solutions.FieldPoint`
(exact rationals or mpmath floats) and the constant coefficient values, and
returns a dict ``equation name -> list of residual entries``.  Derivatives are
jet coefficients: bit ``XBIT`` carries d/dx, ``YBIT`` carries d/dy.

Where the printed form of an equation admits several readings, the reading in
force is named in :data:`CONVENTIONS` and alternatives stay selectable through
keyword flags, so the exact pipeline can discriminate them.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import mpmath

from .jets import Jet, derivative, jdet2, jinv2, jmul, part
from .lax import CoefficientSet, random_constants, system_spec
from .solutions import XBIT, YBIT, FieldPoint, solve_exact

CONVENTIONS = {
    "alpha_words": "alpha_w = <f|K X-_w|f>/<f|K|f> (f = last letter), "
                   "alpha_bar_w = <f|X+_w K|f>/<f|K|f> (f = first letter), letters in written order",
    "A2-10.entry22": "c1*cbar1",
    "B2-10.orientation": "M[a][b] = p_b * pbar_a",
    "G2-01.d2_sign": "p1 = d1 - d^2 a1112/3, p2 = d2 - d^2 a112/3, p3 = d3 - 2 d^2 a12/3, p4 = d4 - 2 d^2 a2",
    "G2-01.p12": "p^{12} = p^{21} = (p3, p2)",
    "G2-10.gauge": "c^3_2 = cbar^3_2 = 0",
    "G2-10.p1": "p^1 = (-c2 + 4c^2 a1 - 6c^3_1 a1^2, c1 + 4c^2 a21 - 3c^3_1 (a121 + 2 a1 a21))",
    "theta2": "theta_2 = <1|K|1>^p / <2|K|2>^2",
    "det3_bracketing": "(2X-1X-2 - 3X-2X-1)X-1 on kets, X+1(2X+2X+1 - 3X+1X+2) on bras, written order",
}

# symmetric (G2-01) and antisymmetric (G2-10) second-rank tensors
EPS_SYM = ((1, -1), (-1, 1))
EPS_ANTI = ((0, 1), (-1, 0))


class SingularU(ZeroDivisionError):
    pass


class NegativeDeterminant(ValueError):
    pass


# -- shared pieces ------------------------------------------------------------

def _val(j):
    return j.value if isinstance(j, Jet) else j


def _dx(j):
    return derivative(j, XBIT).value


def _dy(j):
    return derivative(j, YBIT).value


def _u_data(pt: FieldPoint, root: int):
    u = pt.u(root)
    D = jdet2(u)
    if _val(D) == 0:
        raise SingularU("det u vanishes at this point")
    U = [[_val(e) for e in row] for row in u]
    return u, U, _val(D)


def u_lhs(u):
    """``u (u^-1 u_x)_y`` as plain values."""
    W = jmul(jinv2(u), derivative(u, XBIT))
    return part(jmul(u, derivative(W, YBIT)), 0)


def _mat_res(a, b):
    return [a[r][c] - b[r][c] for r in range(2) for c in range(2)]


def _mm(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(2)) for j in range(2)] for i in range(2)]


def _consts(coeffs) -> dict:
    if isinstance(coeffs, CoefficientSet):
        return {k: coeffs.constant(k) for k in coeffs.polys}
    return dict(coeffs)


# -- A2 (1,0) -------------------------------------------------------------------

def residual_A2_10(pt: FieldPoint, coeffs, entry22: str = "c1*cbar1") -> dict:
    """``u (u^-1 u_x)_y det u - [[c2 cb2, c1 cb2], [c2 cb1, *]]`` (denominator cleared)."""
    c = _consts(coeffs)
    u, U, D = _u_data(pt, 2)
    c1, c2, cb1, cb2 = c["c1"], c["c2"], c["cbar1"], c["cbar2"]
    m22 = {"c1*cbar1": c1 * cb1, "c2*cbar2": c2 * cb2}[entry22]
    M = [[c2 * cb2, c1 * cb2], [c2 * cb1, m22]]
    L = u_lhs(u)
    return {"u": _mat_res([[D * x for x in row] for row in L], M)}


# -- B2 (1,0) -------------------------------------------------------------------

@dataclass
class PFields:
    """p-fields at one point, as jets (values plus x/y derivatives)."""
    p: tuple
    pbar: tuple
    extra: dict = field(default_factory=dict)

    def values(self) -> dict:
        out = {f"p{k + 1}": _val(v) for k, v in enumerate(self.p)}
        out.update({f"pbar{k + 1}": _val(v) for k, v in enumerate(self.pbar)})
        return out


def pfields_B2_10(pt: FieldPoint, coeffs) -> PFields:
    c = _consts(coeffs)
    a1, a21 = pt.alpha((1,)), pt.alpha((2, 1))
    ab1, ab12 = pt.alpha_bar((1,)), pt.alpha_bar((1, 2))
    return PFields((c["c2"] + 2 * c["c^2"] * a1, c["c1"] + 2 * c["c^2"] * a21),
                   (c["cbar2"] + 2 * c["cbar^2"] * ab1, c["cbar1"] + 2 * c["cbar^2"] * ab12))


def residual_B2_10(pt: FieldPoint, coeffs, orientation: str = "p_b*pbar_a") -> dict:
    c = _consts(coeffs)
    u, U, D = _u_data(pt, 2)
    P = pfields_B2_10(pt, c)
    p = [_val(v) for v in P.p]
    pb = [_val(v) for v in P.pbar]
    cc, cbc = c["c^2"], c["cbar^2"]
    if orientation == "p_b*pbar_a":
        M = [[p[b] * pb[a] for b in range(2)] for a in range(2)]
    else:
        M = [[p[a] * pb[b] for b in range(2)] for a in range(2)]
    rhs = [[2 * M[r][s] + 4 * cc * cbc * U[r][s] / D for s in range(2)] for r in range(2)]
    out = {"u": _mat_res(u_lhs(u), rhs)}
    (u11, u12), (u21, u22) = U
    out["p1_y"] = [D * _dy(P.p[0]) - 2 * cc * (u11 * pb[1] - u21 * pb[0])]
    out["p2_y"] = [D * _dy(P.p[1]) - 2 * cc * (u12 * pb[1] - u22 * pb[0])]
    out["pbar1_x"] = [D * _dx(P.pbar[0]) - 2 * cbc * (u11 * p[1] - u12 * p[0])]
    out["pbar2_x"] = [D * _dx(P.pbar[1]) - 2 * cbc * (u21 * p[1] - u22 * p[0])]
    return out


# -- B2 (0,1) -------------------------------------------------------------------

def residual_B2_01(pt: FieldPoint, coeffs) -> dict:
    """``(u^-1 u_x)_y = det^-1 u^-1 [[db2, -db3], [db1, -db2]] u [[d2, d1], [-d3, -d2]]``."""
    c = _consts(coeffs)
    u, U, D = _u_data(pt, 1)
    Db = [[c["dbar2"], -c["dbar3"]], [c["dbar1"], -c["dbar2"]]]
    Dm = [[c["d2"], c["d1"]], [-c["d3"], -c["d2"]]]
    # cleared: det * u (u^-1 u_x)_y - Db u Dm
    L = u_lhs(u)
    return {"u": _mat_res([[D * x for x in row] for row in L], _mm(_mm(Db, U), Dm))}


# -- G2 (0,1) -------------------------------------------------------------------

def pfields_G2_01(pt: FieldPoint, coeffs) -> PFields:
    c = _consts(coeffs)

    def multiplet(d, a):
        d2 = d["d^2"]
        return (d["d1"] - d2 / 3 * a((1, 1, 1, 2)), d["d2"] - d2 / 3 * a((1, 1, 2)),
                d["d3"] - 2 * d2 / 3 * a((1, 2)), d["d4"] - 2 * d2 * a((2,)))

    d = {k: c[k] for k in ("d1", "d2", "d3", "d4", "d^2")}
    db = {k: c["dbar" + k[1:]] for k in d}
    return PFields(multiplet(d, pt.alpha),
                   multiplet(db, lambda w: pt.alpha_bar(tuple(reversed(w)))))


# index pairs of the p-multiplet forming the line vectors p^{ij}
P_VECTORS = {(0, 0): (1, 0), (1, 1): (3, 2), (0, 1): (2, 1), (1, 0): (2, 1)}
P_VECTORS_PRINTED = {(0, 0): (1, 0), (1, 1): (3, 2), (0, 1): (1, 2), (1, 0): (1, 2)}


def _cubic_rows(U, p):
    """The four cubic u-forms of the multiplet evolution, for ``pbar_4 .. pbar_1``."""
    (u11, u12), (u21, u22) = U
    p1, p2, p3, p4 = p
    return {
        4: p1 * u11 ** 3 - 3 * p2 * u11 ** 2 * u12 + 3 * p3 * u11 * u12 ** 2 - p4 * u12 ** 3,
        3: (p1 * u11 ** 2 * u21 - p2 * (u11 ** 2 * u22 + 2 * u11 * u21 * u12)
            + p3 * (2 * u11 * u12 * u22 + u12 ** 2 * u21) - p4 * u12 ** 2 * u22),
        2: (p1 * u11 * u21 ** 2 - p2 * (u21 ** 2 * u12 + 2 * u11 * u21 * u22)
            + p3 * (2 * u22 * u12 * u21 + u22 ** 2 * u11) - p4 * u22 ** 2 * u12),
        1: p1 * u21 ** 3 - 3 * p2 * u21 ** 2 * u22 + 3 * p3 * u21 * u22 ** 2 - p4 * u22 ** 3,
    }


def residual_G2_01(pt: FieldPoint, coeffs, p_vectors=None) -> dict:
    c = _consts(coeffs)
    p_vectors = p_vectors or P_VECTORS
    u, U, D = _u_data(pt, 1)
    P = pfields_G2_01(pt, c)
    p = [_val(v) for v in P.p]
    pb = [_val(v) for v in P.pbar]
    d2, db2 = c["d^2"], c["dbar^2"]
    rhs = [[4 * d2 * db2 * U[r][s] for s in range(2)] for r in range(2)]
    for i, j, k, l in product(range(2), repeat=4):
        e = EPS_SYM[i][k] * EPS_SYM[j][l] * U[i][j] * U[k][l]
        if e == 0:
            continue
        col = [pb[t] for t in p_vectors[(i, k)]]
        row = [p[t] for t in p_vectors[(j, l)]]
        for r in range(2):
            for s in range(2):
                rhs[r][s] += e * col[r] * row[s]
    L = u_lhs(u)
    out = {"u": _mat_res([[D * x for x in row] for row in L], rhs)}
    # (pbar_k)_x = -2 dbar^2 / D^2 * cubic_k(u, p); y-twins with u transposed
    Ut = [[U[0][0], U[1][0]], [U[0][1], U[1][1]]]
    cx, cy = _cubic_rows(U, p), _cubic_rows(Ut, pb)
    for k in (1, 2, 3, 4):
        out[f"pbar{k}_x"] = [D * D * _dx(P.pbar[k - 1]) + 2 * db2 * cx[k]]
        out[f"p{k}_y"] = [D * D * _dy(P.p[k - 1]) + 2 * d2 * cy[k]]
    # the multiplet packs into p^{11} and p^{22}
    out["multiplet"] = [p[1] - p[p_vectors[(0, 0)][0]], p[0] - p[p_vectors[(0, 0)][1]],
                        p[3] - p[p_vectors[(1, 1)][0]], p[2] - p[p_vectors[(1, 1)][1]]]
    return out


# -- G2 (1,0) -------------------------------------------------------------------

def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _icbrt(n: int):
    if n < 0:
        r = _icbrt(-n)
        return None if r is None else -r
    r = int(round(n ** (1 / 3))) if n < 2 ** 60 else 1 << ((n.bit_length() + 2) // 3)
    while True:  # Newton from above/near
        nr = (2 * r + n // (r * r)) // 3 if r else 0
        if nr >= r:
            break
        r = nr
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** 3 == n:
            return cand
    return None


def rational_cbrt(v: Fraction) -> Fraction:
    """Exact cube root of a rational cube; raises ValueError otherwise."""
    v = Fraction(v)
    a, b = _icbrt(v.numerator), _icbrt(v.denominator)
    if a is None or b is None:
        raise ValueError(f"{v} is not the cube of a rational")
    return Fraction(a, b)


def pfields_G2_10(pt: FieldPoint, coeffs) -> PFields:
    """``p^1`` (spinor, entries 0 and 1) and ``p^2`` (entry 2) with their bars."""
    c = _consts(coeffs)

    def fields(k, a):
        c1, c2, cc, c31 = k["c1"], k["c2"], k["c^2"], k["c^3_1"]
        a1, a21, a121 = a((1,)), a((2, 1)), a((1, 2, 1))
        return (-c2 + 4 * cc * a1 - 6 * c31 * a1 * a1,
                c1 + 4 * cc * a21 - 3 * c31 * (a121 + 2 * a1 * a21),
                cc - 3 * c31 * a1)

    k = {n: c[n] for n in ("c1", "c2", "c^2", "c^3_1")}
    kb = {n: c[n.replace("c", "cbar", 1)] for n in k}
    return PFields(fields(k, pt.alpha), fields(kb, lambda w: pt.alpha_bar(tuple(reversed(w)))))


def p1_from_line_operator(pt: FieldPoint, coeffs) -> tuple:
    """The spinor p^1 obtained by acting with the line operator on ``<1|K|1>**4``.

    Components ``-c2 + c^2 X-1 - (1/2) c^3_1 X-1X-1`` and
    ``c1 + c^2 X-2X-1 + (1/8) c^3_1 (X-2X-1X-1 - 6 X-1X-2X-1)`` act as right
    regular actions (words in written order) and the result is divided by
    ``<1|K|1>**4``.  Independent cross-check of :func:`pfields_G2_10` (values only).
    """
    c = _consts(coeffs)
    reps = pt.reps

    def act(words):
        tot = 0
        for coef, w in words:
            right = {i: [(1 << k, reps[i].X("-", a)) for k, a in enumerate(w)] for i in reps}
            h = FieldPoint(pt.Ks, reps, right=right).me(1)
            f = h * h * h * h
            tot += coef * f[(1 << len(w)) - 1] / f.value
        return tot
    c1, c2, cc, c31 = c["c1"], c["c2"], c["c^2"], c["c^3_1"]
    first = -c2 + cc * act([(1, (1,))]) - c31 / 2 * act([(1, (1, 1))])
    second = c1 + cc * act([(1, (2, 1))]) + c31 / 8 * act([(1, (2, 1, 1)), (-6, (1, 2, 1))])
    return first, second


def residual_G2_10(pt: FieldPoint, coeffs, cube_root=None, extra_term: bool = True) -> dict:
    """Residuals of the u-equation and the p-evolution equations.

    ``cube_root(det)`` supplies ``det**(1/3)``.  By default every value is
    converted to mpf and the real cube root is taken at the working precision;
    :func:`rational_cbrt` gives an exact alternative when det u is a rational cube.
    Requires det u > 0.
    """
    c = _consts(coeffs)
    u, U, D = _u_data(pt, 2)
    if D <= 0:
        raise NegativeDeterminant("det u <= 0: real cube root branch not selected")
    P = pfields_G2_10(pt, c)
    if cube_root is None:
        f = _to_mpf
        h = mpmath.cbrt(f(D))
    else:
        f = lambda v: v
        h = cube_root(D)
    U = [[f(x) for x in row] for row in U]
    D = f(D)
    p = [f(_val(v)) for v in P.p]
    pb = [f(_val(v)) for v in P.pbar]
    c3 = [f(c["c^3_1"]), f(c["c^3_2"])]
    cb3 = [f(c["cbar^3_1"]), f(c["cbar^3_2"])]
    L = [[f(x) for x in row] for row in u_lhs(u)]
    epsv = lambda v: [EPS_ANTI[0][0] * v[0] + EPS_ANTI[0][1] * v[1], EPS_ANTI[1][0] * v[0] + EPS_ANTI[1][1] * v[1]]
    uc = [U[r][0] * cb3[0] + U[r][1] * cb3[1] for r in range(2)]      # u cbar^3 (column)
    cu = [c3[0] * U[0][s] + c3[1] * U[1][s] for s in range(2)]        # c^3 u (row)
    ecb, ec = epsv(cb3), epsv(c3)
    rhs = [[3 * h * pb[r] * p[s] + 12 / h * pb[2] * p[2] * U[r][s] + 36 / D * uc[r] * cu[s]
            + (72 * ecb[r] * ec[s] if extra_term else 0) for s in range(2)] for r in range(2)]
    out = {"u": _mat_res(L, rhs)}
    h2 = h * h
    # sum_{j,l} u_ij eps_jl p1_l and its hermitian conjugate (u transposed, p <-> pbar)
    up = [sum(U[i][j] * EPS_ANTI[j][l] * p[l] for j in range(2) for l in range(2)) for i in range(2)]
    pu = [sum(U[j][i] * EPS_ANTI[j][l] * pb[l] for j in range(2) for l in range(2)) for i in range(2)]
    out["pbar2_x"] = [f(_dx(P.pbar[2])) + 3 / h2 * (cb3[0] * up[0] + cb3[1] * up[1])]
    out["p2_y"] = [f(_dy(P.p[2])) + 3 / h2 * (c3[0] * pu[0] + c3[1] * pu[1])]
    for i in range(2):
        out[f"pbar1_{i + 1}_x"] = [f(_dx(P.pbar[i])) - 4 / h2 * pb[2] * up[i] + 12 / h * p[2] * ecb[i]]
        out[f"p1_{i + 1}_y"] = [f(_dy(P.p[i])) - 4 / h2 * p[2] * pu[i] + 12 / h * pb[2] * ec[i]]
    return out


RESIDUALS = {
    "A2-10": residual_A2_10,
    "B2-10": residual_B2_10,
    "B2-01": residual_B2_01,
    "G2-01": residual_G2_01,
    "G2-10": residual_G2_10,
}


# -- orchestration ----------------------------------------------------------------

GAUGE_ZERO = {"G2-10": ("c^3_2", "cbar^3_2")}


@dataclass
class ResidualReport:
    system: str
    mode: str
    points: list
    max_residuals: dict
    passed: bool
    seed: int
    coeffs: dict
    tolerance: str
    precision: int | None = None
    rejected: int = 0
    dressed: bool = False
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def to_dict(self) -> dict:
        return {"system": self.system, "mode": self.mode, "seed": self.seed,
                "points": self.points, "max_residuals": self.max_residuals,
                "pass": self.passed, "tolerance": self.tolerance, "precision": self.precision,
                "rejected_points": self.rejected, "dressed": self.dressed, "coeffs": self.coeffs,
                "conventions": self.conventions}

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)


def default_coefficients(system, seed: int) -> CoefficientSet:
    """Random nonzero constant coefficients (G2-10 in the gauge c^3_2 = cbar^3_2 = 0)."""
    return random_constants(system, random.Random(seed), zero=GAUGE_ZERO.get(system_spec(system).name, ()))


def _fmt(v, digits=8) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return mpmath.nstr(v, digits)


def verify_system(system, coeffs: CoefficientSet | None = None, mode: str = "exact",
                  points: int = 20, seed: int = 0, precision: int = 60,
                  step=Fraction(1, 50), tol=None, dressing=None, **flags) -> ResidualReport:
    """Solve, sample points, evaluate every residual, aggregate maxima.

    Coefficients must be constant with A0 = B0 = 0 (the systems are derived
    under these assumptions; polynomial coefficients are exercised at the level
    of K by :func:`~rank2lab.solutions.richardson_defects`).

    exact: rational points with small denominators in (0, 1)^2, residuals must
    be the zero rational (G2-10: evaluated at ``precision`` digits, tolerance
    10^(-precision/2)).  ``dressing`` is an optional constant group element G
    giving K = M+ G M- (general solution).  numeric: RK4 grid points, tolerance ``tol``
    (default 10^(-precision/2)).  Points with det u = 0 (or det u <= 0 for
    G2-10) are rejected and resampled; in exact mode the sampling box shrinks
    towards the origin (where u = 1) after repeated rejections.
    """
    from .solutions import NonConstantCoefficients, NonzeroGradeZero, solve_numeric

    spec = system_spec(system)
    coeffs = coeffs or default_coefficients(spec.name, seed)
    # the derived systems are statements about constant coefficients without grade-0 parts
    if not coeffs.is_constant:
        raise NonConstantCoefficients("the integrable systems are verified for constant coefficients")
    if coeffs.has_grade_zero:
        raise NonzeroGradeZero("the integrable systems are verified with A0 = B0 = 0")
    fn = RESIDUALS[spec.name]
    rng = random.Random(seed)
    floating = mode == "numeric" or spec.name == "G2-10"
    tolerance = mpmath.mpf(10) ** (-(precision // 2)) if tol is None else mpmath.mpf(tol)
    maxima: dict = {}
    sampled, rejected = [], 0
    with mpmath.workdps(precision):
        if mode == "exact":
            sol = solve_exact(spec.name, coeffs, dressing=dressing)
            # det u = 1 at the origin: shrink the box towards it while points keep being rejected
            make = lambda: _rational_point(rng, Fraction(1, 2 ** (rejected // (2 * points + 2))))
            at = lambda xy: sol.point(*xy)
            label = lambda xy: [str(xy[0]), str(xy[1])]
        elif mode == "numeric":
            sol = solve_numeric(spec.name, coeffs, (1, 1), step, precision, dressing=dressing)
            make = lambda: (rng.randint(1, sol.nx), rng.randint(1, sol.ny))
            at = lambda k: sol.point(*k)
            label = lambda k: [mpmath.nstr(v, 12) for v in sol.coords(*k)]
        else:
            raise ValueError(f"mode must be 'exact' or 'numeric', got {mode!r}")
        tries = 0
        while len(sampled) < points:
            tries += 1
            if tries > 20 * points + 20:
                raise SingularU(f"too many rejected points ({rejected})")
            xy = make()
            try:
                res = fn(at(xy), coeffs, **flags)
            except (SingularU, NegativeDeterminant):
                rejected += 1
                continue
            sampled.append(xy)
            for name, vals in res.items():
                m = max((abs(v) for v in vals), default=0)
                if name not in maxima or m > maxima[name]:
                    maxima[name] = m
        if floating:
            passed = all(m <= tolerance for m in maxima.values())
            tol_str = mpmath.nstr(tolerance, 3)
        else:
            passed = all(m == 0 for m in maxima.values())
            tol_str = "0"
        out = {k: _fmt(v) for k, v in sorted(maxima.items())}
    return ResidualReport(spec.name, mode, [label(p) for p in sorted(sampled)], out, passed, seed,
                          coeffs.echo(), tol_str, precision if floating else None, rejected,
                          dressing is not None)


def _rational_point(rng: random.Random, scale=Fraction(1)):
    dx, dy = rng.randint(2, 12), rng.randint(2, 12)
    return scale * Fraction(rng.randint(1, dx - 1), dx), scale * Fraction(rng.randint(1, dy - 1), dy)
