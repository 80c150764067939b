import random
from fractions import Fraction

import mpmath
import pytest

from rank2lab.groups import matrix_element
from rank2lab.identities import regular_sample
from rank2lab.reps import pair

from rank2lab.jets import jdet2, jinv2, jmul
from rank2lab.lax import SYSTEMS, CoefficientSet, gauge_transform, random_constants
from rank2lab.solutions import NonConstantCoefficients, NonzeroGradeZero, YBIT, extract_u, solve_exact
from rank2lab.systems import (CONVENTIONS, P_VECTORS_PRINTED, RESIDUALS, NegativeDeterminant, default_coefficients,
                              p1_from_line_operator, pfields_B2_10, pfields_G2_10, rational_cbrt, residual_A2_10,
                              residual_B2_01, residual_B2_10, residual_G2_01, residual_G2_10, u_lhs, verify_system)

POINTS = [(Fraction(1, 3), Fraction(2, 5)), (Fraction(3, 4), Fraction(1, 6)), (Fraction(2, 7), Fraction(5, 9))]


def max_abs(res):
    return max(abs(v) for vals in res.values() for v in vals)


def solution(system, seed, zero=()):
    co = random_constants(system, random.Random(seed), zero=zero)
    return co, solve_exact(system, co)


@pytest.mark.parametrize("system", ["A2-10", "B2-10", "B2-01", "G2-01"])
def test_exact_residuals_vanish(system):
    for seed in range(2):
        co, sol = solution(system, seed)
        for x, y in POINTS:
            res = RESIDUALS[system](sol.point(x, y), co)
            assert all(v == 0 for vals in res.values() for v in vals), res


@pytest.mark.parametrize("system", sorted(SYSTEMS))
def test_zero_coefficients(system):
    co = CoefficientSet.constants(system, {})
    sol = solve_exact(system, co)
    assert max_abs(RESIDUALS[system](sol.point(*POINTS[0]), co)) == 0


def test_g2_10_exact_with_rational_cube_root():
    co, sol = solution("G2-10", 2, zero=("c^3_2", "cbar^3_2"))
    for x, y in POINTS:
        pt = sol.point(x, y)
        try:
            res = residual_G2_10(pt, co, cube_root=rational_cbrt)
        except NegativeDeterminant:
            continue
        assert max_abs(res) == 0
        assert jdet2(extract_u(pt, "G2-10")).value == pt.me(1).value ** 3


def test_g2_10_precision_scaling():
    co, sol = solution("G2-10", 1, zero=("c^3_2", "cbar^3_2"))
    pt = sol.point(*POINTS[0])
    with mpmath.workdps(40):
        r40 = max_abs(residual_G2_10(pt, co))
    with mpmath.workdps(80):
        r80 = max_abs(residual_G2_10(pt, co))
    assert r40 < mpmath.mpf(10) ** -30 and r80 < mpmath.mpf(10) ** -70


def test_rational_cbrt():
    assert rational_cbrt(Fraction(-27, 8)) == Fraction(-3, 2)
    with pytest.raises(ValueError):
        rational_cbrt(Fraction(2))


# -- the rejected readings really fail -------------------------------------------------

def test_a2_10_entry22_alternative_fails():
    co, sol = solution("A2-10", 0)
    pt = sol.point(*POINTS[0])
    assert max_abs(residual_A2_10(pt, co)) == 0
    assert max_abs(residual_A2_10(pt, co, entry22="c2*cbar2")) != 0


def test_b2_10_orientation_alternative_fails():
    co, sol = solution("B2-10", 0)
    pt = sol.point(*POINTS[0])
    assert max_abs(residual_B2_10(pt, co, orientation="p_a*pbar_b")) != 0


def test_g2_01_printed_multiplet_fails():
    co, sol = solution("G2-01", 0)
    pt = sol.point(*POINTS[0])
    assert max_abs(residual_G2_01(pt, co, p_vectors=P_VECTORS_PRINTED)) != 0


def test_g2_10_needs_extra_term_and_gauge():
    co, sol = solution("G2-10", 3, zero=("c^3_2", "cbar^3_2"))
    near = (Fraction(1, 10), Fraction(1, 7))
    pt = sol.point(*near)
    with mpmath.workdps(40):
        assert max_abs(residual_G2_10(pt, co)) < 1e-30
        assert max_abs(residual_G2_10(pt, co, extra_term=False)) > 1e-5
        off, sol2 = solution("G2-10", 3)
        assert max_abs(residual_G2_10(sol2.point(*near), off)) > 1e-5


# -- p-fields ----------------------------------------------------------------------

def test_p_fields_at_the_origin():
    co, sol = solution("B2-10", 6)
    P = pfields_B2_10(sol.point(0, 0), co)
    assert [v.value for v in P.p] == [co.constant("c2"), co.constant("c1")]
    co, sol = solution("G2-10", 6, zero=("c^3_2", "cbar^3_2"))
    P = pfields_G2_10(sol.point(0, 0), co)
    assert [v.value for v in P.p[:2]] == [-co.constant("c2"), co.constant("c1")]


def test_g2_10_line_operator():
    co, sol = solution("G2-10", 7, zero=("c^3_2", "cbar^3_2"))
    for x, y in POINTS:
        pt = sol.point(x, y)
        assert p1_from_line_operator(pt, co) == tuple(v.value for v in pfields_G2_10(pt, co).p[:2])


def test_b2_10_reduction_to_toda():
    co, sol = solution("B2-10", 4, zero=("c^2", "cbar^2"))
    for x, y in POINTS:
        pt = sol.point(x, y)
        P = pfields_B2_10(pt, co)
        assert all(v[YBIT] == 0 for v in P.p)
        assert [v.value for v in P.p] == [co.constant("c2"), co.constant("c1")]
        assert max_abs(residual_B2_10(pt, co)) == 0


# -- gauge covariance ------------------------------------------------------------------

def test_u_equation_covariance():
    co, sol = solution("A2-10", 9)
    u = extract_u(sol.point(*POINTS[2]), "A2-10")
    g, gb = [[2, 1], [0, Fraction(1, 3)]], [[1, 0], [-2, 5]]
    lhs = u_lhs(gauge_transform(u, g, gb))
    expected = jmul(jmul(gb, [[v for v in row] for row in u_lhs(u)]), g)
    assert [[v for v in row] for row in lhs] == [[e.value for e in row] for row in expected]


def test_b2_01_form_invariance():
    """u -> gb u g with constant g, gb maps the equation to one with conjugated d-matrices."""
    co, sol = solution("B2-01", 1)
    c = {k: co.constant(k) for k in co.polys}
    Db = [[c["dbar2"], -c["dbar3"]], [c["dbar1"], -c["dbar2"]]]
    Dm = [[c["d2"], c["d1"]], [-c["d3"], -c["d2"]]]
    g, gb = [[1, 2], [Fraction(1, 2), 3]], [[-1, 1], [4, Fraction(1, 3)]]
    dg, dgb = jdet2(g), jdet2(gb)
    Db2 = [[dgb * e for e in row] for row in jmul(jmul(gb, Db), jinv2(gb))]
    Dm2 = [[dg * e for e in row] for row in jmul(jmul(jinv2(g), Dm), g)]
    assert Db2[0][0] == -Db2[1][1] and Dm2[0][0] == -Dm2[1][1]
    for x, y in POINTS:
        v = gauge_transform(extract_u(sol.point(x, y), "B2-01"), g, gb)
        D = jdet2(v).value
        V = [[e.value for e in row] for row in v]
        rhs = jmul(jmul(Db2, V), Dm2)
        lhs = u_lhs(v)
        assert all(D * lhs[r][s] == rhs[r][s].value for r in range(2) for s in range(2))
    assert max_abs(residual_B2_01(sol.point(*POINTS[0]), co)) == 0


# -- orchestration -----------------------------------------------------------------------

def test_verify_system_report():
    report = verify_system("A2-10", points=5, seed=3)
    assert report.passed and set(report.max_residuals.values()) == {"0"}
    data = report.to_dict()
    assert data["conventions"] == CONVENTIONS and len(data["points"]) == 5
    assert verify_system("A2-10", points=5, seed=3).to_dict() == data


def test_verify_system_g2_10_rejects_negative_determinants():
    rejected = 0
    for seed in range(6):
        report = verify_system("G2-10", points=10, seed=seed, precision=40)
        assert report.passed
        rejected += report.rejected
    assert rejected > 0


def test_verify_system_preconditions():
    with pytest.raises(NonConstantCoefficients):
        verify_system("A2-10", CoefficientSet("A2-10", {"c1": [1, 1]}))
    with pytest.raises(NonzeroGradeZero):
        verify_system("A2-10", CoefficientSet("A2-10", {"c1": [1]}, Bzero={"h2": [1]}))
    with pytest.raises(ValueError):
        verify_system("A2-10", mode="symbolic")


def test_default_coefficients_gauge():
    co = default_coefficients("G2-10", 0)
    assert co.constant("c^3_2") == 0 and co.constant("cbar^3_2") == 0
    assert co.constant("c^3_1") != 0


def test_verify_numeric_mode():
    report = verify_system("G2-01", mode="numeric", points=4, precision=30, step=Fraction(1, 10))
    assert report.passed and report.mode == "numeric"


@pytest.mark.slow
def test_verify_numeric_fine_step():
    report = verify_system("B2-10", mode="numeric", points=5, precision=30, step=Fraction(1, 1000), tol="1e-8")
    assert report.passed


# -- general solution: constant dressing K = M+ G M- -------------------------------------

@pytest.mark.parametrize("system, algebra", [("A2-10", "A2"), ("B2-10", "B2"), ("B2-01", "B2"), ("G2-01", "G2")])
def test_dressed_solutions(system, algebra):
    G = regular_sample(pair(algebra), 1)
    report = verify_system(system, points=6, seed=1, dressing=G)
    assert report.passed and set(report.max_residuals.values()) == {"0"}


def test_dressed_g2_10():
    G = regular_sample(pair("G2"), 2)
    assert matrix_element(G, 1) > 0
    assert verify_system("G2-10", points=6, seed=2, dressing=G, precision=40).passed
