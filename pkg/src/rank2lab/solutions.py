"""General solutions K = M+(y) M-(x) and the derivative-by-insertion calculus.

With ``M+_y = (B0 + L+) M+`` and ``M-_x = M- (A0 + L-)`` the composite
``K = M+ M-`` satisfies ``K_x = K (A0 + L-)``, ``K_y = (B0 + L+) K`` and
``K_xy = (B0 + L+) K (A0 + L-)``.  A :class:`FieldPoint` packages K at one
point together with these insertions as a jet, so any expression built from
matrix elements of K carries its x-, y- and mixed derivatives exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .groups import NotNilpotent
from .jets import Jet, JetMatrix
from .lax import CoefficientSet, build_lax, system_spec
from .linalg import eye, is_zero, zeros
from .reps import pair

XBIT, YBIT = 1, 2


class NonConstantCoefficients(ValueError):
    pass


class NonzeroGradeZero(ValueError):
    pass


class StepTooLarge(RuntimeError):
    pass


class FieldPoint:
    """Matrix elements of K (in both fundamentals) as jets at one point.

    ``extra_left`` / ``extra_right`` add further first-order displacements,
    e.g. regular actions of simple generators used as derivative surrogates.
    """

    def __init__(self, Ks: dict, reps: dict, left: dict | None = None, right: dict | None = None):
        self.reps = reps
        self.Ks = Ks
        self.jm = {i: JetMatrix(Ks[i], (left or {}).get(i, ()), (right or {}).get(i, ()))
                   for i in reps}
        self._cache: dict = {}

    def me(self, i: int, bra=(), ket=()) -> Jet:
        """``<i| X+_{bra...} K X-_{ket...} |i>`` with letters in written order."""
        key = (i, tuple(bra), tuple(ket))
        if key not in self._cache:
            rep = self.reps[i]
            self._cache[key] = self.jm[i].element(rep.bra(bra), rep.ket(ket),
                                                  ("w",) + tuple(bra), ("w",) + tuple(ket))
        return self._cache[key]

    def hw(self, i: int) -> Jet:
        return self.me(i)

    def alpha(self, word) -> Jet:
        """``<f|K X-_{w1} X-_{w2}...|f> / <f|K|f>`` with ``f`` the last letter of the word."""
        word = tuple(word)
        f = word[-1]
        return self.me(f, (), word) / self.me(f)

    def alpha_bar(self, word) -> Jet:
        """``<f|X+_{w1} X+_{w2}... K|f> / <f|K|f>`` with ``f`` the first letter of the word.

        The hermitian conjugate of ``alpha(w)`` is ``alpha_bar(reversed(w))``.
        """
        word = tuple(word)
        f = word[0]
        return self.me(f, word, ()) / self.me(f)

    def theta(self, j: int, variant: str = "cartan") -> Jet:
        """``theta_j = prod_i <i|K|i>**(-K_ji)``.

        ``variant="literal"`` evaluates theta_2 as ``<1|K|1>**p / <1|K|1>**2``
        instead (the alternative reading checked by the identity suite).
        """
        p = self.reps[1].p
        h1, h2 = self.me(1), self.me(2)
        if j == 1:
            return h2 / (h1 * h1)
        if variant == "literal":
            return h1 ** p / (h1 * h1)
        return h1 ** p / (h2 * h2)

    def u(self, root: int):
        """2x2 block over the red-root basis ``|root>, X-_root |root>``."""
        b = (root,)
        return [[self.me(root, (), ()), self.me(root, (), b)],
                [self.me(root, b, ()), self.me(root, b, b)]]


def solution_jets(Ks, lax, reps, extra_left=None, extra_right=None) -> FieldPoint:
    left = {i: [(YBIT, lax.Bzero[i] + lax.Lplus[i])] + list((extra_left or {}).get(i, ()))
            for i in reps}
    right = {i: [(XBIT, lax.Azero[i] + lax.Lminus[i])] + list((extra_right or {}).get(i, ()))
             for i in reps}
    return FieldPoint(Ks, reps, left, right)


# -- exact mode ---------------------------------------------------------------

@dataclass
class ExactSolution:
    """K(x, y) as a dense bivariate polynomial per fundamental.

    ``poly[i][(a, b)]`` is the matrix coefficient of ``y**a x**b``.
    """
    system: str
    coeffs: CoefficientSet
    reps: dict
    Lplus: dict
    Lminus: dict
    poly: dict = field(repr=False)
    mode: str = "exact"

    def K(self, i, x, y) -> np.ndarray:
        x, y = Fraction(x), Fraction(y)
        n = self.reps[i].dim
        out = zeros(n)
        for (a, b), m in self.poly[i].items():
            out = out + (y ** a) * (x ** b) * m
        return out

    def K_at(self, x, y) -> dict:
        return {i: self.K(i, x, y) for i in self.reps}

    def point(self, x, y, extra_left=None, extra_right=None) -> FieldPoint:
        lax = build_lax(self.system, self.coeffs, self.reps, Fraction(x), Fraction(y))
        return solution_jets(self.K_at(x, y), lax, self.reps, extra_left, extra_right)

    def degree(self, i) -> tuple:
        keys = list(self.poly[i])
        return max(a for a, _ in keys), max(b for _, b in keys)

    def hw_derivatives(self, i, x, y) -> dict:
        """<i|K|i> and its x-, y-, xy-derivatives from the polynomial itself."""
        bra, ket = self.reps[i].hw_bra(), self.reps[i].hw_ket()
        out = {}
        for key, (da, db) in (("v", (0, 0)), ("x", (0, 1)), ("y", (1, 0)), ("xy", (1, 1))):
            tot = Fraction(0)
            for (a, b), m in self.poly[i].items():
                if a >= da and b >= db:
                    c = math.perm(a, da) * math.perm(b, db)
                    tot += c * y ** (a - da) * x ** (b - db) * bra.dot(m).dot(ket)[0, 0]
            out[key] = tot
        return out

    def derivative_defects(self) -> dict:
        """Polynomial residuals of K_x - K L- and K_y - L+ K (must vanish)."""
        out = {}
        for i in self.reps:
            p = self.poly[i]
            n = self.reps[i].dim
            dx, dy, kl, lk = {}, {}, {}, {}
            for (a, b), m in p.items():
                if b:
                    dx[(a, b - 1)] = dx.get((a, b - 1), zeros(n)) + b * m
                if a:
                    dy[(a - 1, b)] = dy.get((a - 1, b), zeros(n)) + a * m
                kl[(a, b)] = m.dot(self.Lminus[i])
                lk[(a, b)] = self.Lplus[i].dot(m)
            keys = set(dx) | set(kl)
            ex = all(is_zero(dx.get(k, zeros(n)) - kl.get(k, zeros(n))) for k in keys)
            keys = set(dy) | set(lk)
            ey = all(is_zero(dy.get(k, zeros(n)) - lk.get(k, zeros(n))) for k in keys)
            out[i] = (ex, ey)
        return out


def _dressing_mats(dressing, reps) -> dict | None:
    """``{i: matrix}`` from a GroupElement or a dict (``None`` means no dressing)."""
    if dressing is None:
        return None
    mats = dressing.mats if hasattr(dressing, "mats") else dressing
    for i, rep in reps.items():
        if mats[i].shape != (rep.dim, rep.dim):
            raise ValueError(f"dressing matrix for fundamental {i} has the wrong shape")
    return mats


def solve_exact(system, coeffs: CoefficientSet, reps=None, dressing=None) -> ExactSolution:
    """K = M+(y) G M-(x) with M+- the terminating exponentials of L+- y and L- x.

    ``dressing`` is an optional constant group element G (default the identity):
    M+- are fixed only up to constant factors, and G restores the general solution.
    """
    spec = system_spec(system)
    if not coeffs.is_constant:
        raise NonConstantCoefficients("exact mode needs constant coefficients")
    if coeffs.has_grade_zero:
        raise NonzeroGradeZero("exact mode needs A0 = B0 = 0")
    reps = reps or pair(spec.algebra)
    lax = build_lax(spec, coeffs, reps)
    dress = _dressing_mats(dressing, reps)
    poly = {}
    for i, rep in reps.items():
        plus_powers = _scaled_powers(lax.Lplus[i])
        minus_powers = _scaled_powers(lax.Lminus[i])
        poly[i] = {}
        for a, pa in enumerate(plus_powers):
            for b, mb in enumerate(minus_powers):
                m = pa.dot(dress[i]).dot(mb) if dress else pa.dot(mb)
                if not is_zero(m):
                    poly[i][(a, b)] = m
    return ExactSolution(spec.name, coeffs, reps, lax.Lplus, lax.Lminus, poly)


def _scaled_powers(m):
    """[m**k / k! for k = 0..] up to the last nonzero power."""
    n = m.shape[0]
    out = [eye(n)]
    term = eye(n)
    for k in range(1, n + 1):
        term = term.dot(m) / k
        if is_zero(term):
            return out
        out.append(term)
    raise NotNilpotent("L+- is not nilpotent")


# -- numeric mode ---------------------------------------------------------------

def to_mpf_matrix(m: np.ndarray) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for idx, v in np.ndenumerate(m):
        out[idx] = mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else mpmath.mpf(v)
    return out


def _generator(system, coeffs, reps, side):
    """``t -> A0(t) + L-(t)`` (side "x") or ``t -> B0(t) + L+(t)`` (side "y") per fundamental."""
    def at(t):
        lax = build_lax(system, coeffs, reps, x=t, y=t)
        if side == "x":
            return {i: to_mpf_matrix(lax.Azero[i] + lax.Lminus[i]) for i in reps}
        return {i: to_mpf_matrix(lax.Bzero[i] + lax.Lplus[i]) for i in reps}
    return at


def rk4_path(gen, n_steps: int, h, reps, right: bool) -> dict:
    """Classical RK4 for ``M' = M A(t)`` (``right``) or ``M' = A(t) M`` from M(0) = 1."""
    mul = (lambda m, a: m.dot(a)) if right else (lambda m, a: a.dot(m))
    path = {i: [to_mpf_matrix(eye(rep.dim))] for i, rep in reps.items()}
    for k in range(n_steps):
        t = k * h
        a0, a1, a2 = gen(t), gen(t + h / 2), gen(t + h)
        for i in reps:
            m = path[i][-1]
            k1 = mul(m, a0[i])
            k2 = mul(m + (h / 2) * k1, a1[i])
            k3 = mul(m + (h / 2) * k2, a1[i])
            k4 = mul(m + h * k3, a2[i])
            path[i].append(m + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4))
    return path


@dataclass
class NumericSolution:
    """M- on the x-axis grid and M+ on the y-axis grid; K = M+ M- at grid points."""
    system: str
    coeffs: CoefficientSet
    reps: dict
    precision: int
    step_x: object
    step_y: object
    Mminus: dict = field(repr=False)
    Mplus: dict = field(repr=False)
    dressing: dict | None = field(default=None, repr=False)
    mode: str = "numeric"

    @property
    def nx(self):
        return len(next(iter(self.Mminus.values()))) - 1

    @property
    def ny(self):
        return len(next(iter(self.Mplus.values()))) - 1

    def K_index(self, i, kx, ky) -> np.ndarray:
        if self.dressing:
            return self.Mplus[i][ky].dot(self.dressing[i]).dot(self.Mminus[i][kx])
        return self.Mplus[i][ky].dot(self.Mminus[i][kx])

    def K_at_index(self, kx, ky) -> dict:
        return {i: self.K_index(i, kx, ky) for i in self.reps}

    def coords(self, kx, ky):
        return kx * self.step_x, ky * self.step_y

    def point(self, kx, ky, extra_left=None, extra_right=None) -> FieldPoint:
        x, y = self.coords(kx, ky)
        lax = build_lax(self.system, self.coeffs, self.reps, x, y)
        conv = lambda d: {i: to_mpf_matrix(m) for i, m in d.items()}
        lax.Lplus, lax.Lminus = conv(lax.Lplus), conv(lax.Lminus)
        lax.Azero, lax.Bzero = conv(lax.Azero), conv(lax.Bzero)
        return solution_jets(self.K_at_index(kx, ky), lax, self.reps, extra_left, extra_right)


def solve_numeric(system, coeffs: CoefficientSet, domain=(1, 1), step=Fraction(1, 100),
                  precision: int = 30, reps=None, tol=None, dressing=None) -> NumericSolution:
    """Integrate M-_x = M-(A0 + L-) and M+_y = (B0 + L+)M+ on [0, X] x [0, Y].

    The step is adjusted down so that it divides each side.  With ``tol`` the
    run is repeated at half the step and :class:`StepTooLarge` is raised if the
    endpoint matrices move by more than ``tol``.  ``dressing`` as in :func:`solve_exact`.
    """
    spec = system_spec(system)
    step = Fraction(step)
    if step <= 0:
        raise ValueError("step must be positive")
    if precision < 30:
        raise ValueError("precision must be at least 30 digits")
    reps = reps or pair(spec.algebra)
    with mpmath.workdps(precision):
        sol = _integrate(spec, coeffs, reps, domain, step, precision)
        dress = _dressing_mats(dressing, reps)
        sol.dressing = {i: to_mpf_matrix(m) for i, m in dress.items()} if dress else None
        if tol is not None:
            half = _integrate(spec, coeffs, reps, domain, Fraction(step) / 2, precision)
            diff = max(_max_abs(sol.Mminus[i][-1] - half.Mminus[i][-1]) +
                       _max_abs(sol.Mplus[i][-1] - half.Mplus[i][-1]) for i in reps)
            if diff > tol:
                raise StepTooLarge(f"halving the step moves the solution by {mpmath.nstr(diff, 5)} > {tol}")
    return sol


def _integrate(spec, coeffs, reps, domain, step, precision) -> NumericSolution:
    X, Y = (mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator for v in domain)
    step = mpmath.mpf(Fraction(step).numerator) / Fraction(step).denominator
    nx = max(1, int(mpmath.ceil(X / step - mpmath.mpf(10) ** (-precision // 2))))
    ny = max(1, int(mpmath.ceil(Y / step - mpmath.mpf(10) ** (-precision // 2))))
    hx, hy = X / nx, Y / ny
    mm = rk4_path(_generator(spec, coeffs, reps, "x"), nx, hx, reps, right=True)
    mp_ = rk4_path(_generator(spec, coeffs, reps, "y"), ny, hy, reps, right=False)
    return NumericSolution(spec.name, coeffs, reps, precision, hx, hy, mm, mp_)


def _max_abs(m) -> mpmath.mpf:
    return max((abs(v) for v in np.asarray(m).flat), default=mpmath.mpf(0))


def richardson_defects(system, coeffs, steps, domain=(1, 1), precision=40, reps=None) -> list:
    """``e(h) = max |K_h - K_{h/2}|`` at the far corner, for each h in ``steps``.

    For a 4th-order method consecutive ratios e(h)/e(h/2) approach 16.
    """
    spec = system_spec(system)
    reps = reps or pair(spec.algebra)
    out = []
    with mpmath.workdps(precision):
        cache = {}

        def corner(h):
            if h not in cache:
                s = _integrate(spec, coeffs, reps, domain, h, precision)
                cache[h] = s.K_at_index(s.nx, s.ny)
            return cache[h]
        for h in steps:
            h = Fraction(h)
            a, b = corner(h), corner(h / 2)
            out.append(max(_max_abs(a[i] - b[i]) for i in reps))
    return out


def dump_solution(sol, path, points=None) -> None:
    """JSON dump: exact polynomial tables, or numeric grid samples as decimal strings."""
    data = {"mode": sol.mode, "system": sol.system, "coeffs": sol.coeffs.echo()}
    if sol.mode == "exact":
        data["poly"] = {str(i): [{"y": a, "x": b, "matrix": [[str(v) for v in row] for row in m]}
                                 for (a, b), m in sorted(tab.items())]
                        for i, tab in sol.poly.items()}
    else:
        pts = points or [(kx, ky) for kx in range(sol.nx + 1) for ky in range(sol.ny + 1)]
        digits = sol.precision
        grid = []
        for kx, ky in pts:
            x, y = sol.coords(kx, ky)
            K = sol.K_at_index(kx, ky)
            grid.append({"x": mpmath.nstr(x, digits), "y": mpmath.nstr(y, digits),
                         "K": {str(i): [[mpmath.nstr(v, digits) for v in row] for row in m]
                               for i, m in K.items()}})
        data.update(precision=digits, step=[mpmath.nstr(sol.step_x, digits), mpmath.nstr(sol.step_y, digits)],
                    grid=grid)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)


# -- u extraction and derivative checks ---------------------------------------------

def extract_u(point: FieldPoint, system):
    return point.u(system_spec(system).u_root)


def mixed_derivative_check(sol: ExactSolution, i: int, points) -> Fraction:
    """Max |(ln<i|K|i>)_xy - det-form| over points.

    The left side differentiates the polynomial K directly; the right side is
    ``(<i|K|i> <i|K_xy|i> - <i|K_x|i><i|K_y|i>) / <i|K|i>^2`` with the
    derivatives supplied by L+/L- insertions.
    """
    worst = Fraction(0)
    for x, y in points:
        x, y = Fraction(x), Fraction(y)
        vals = sol.hw_derivatives(i, x, y)
        lhs = (vals["v"] * vals["xy"] - vals["x"] * vals["y"]) / vals["v"] ** 2
        f = sol.point(x, y).me(i)
        rhs = (f[0] * f[XBIT | YBIT] - f[XBIT] * f[YBIT]) / f[0] ** 2
        worst = max(worst, abs(lhs - rhs))
    return worst
