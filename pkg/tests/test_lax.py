import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rank2lab.jets import Jet, jdet2
from rank2lab.lax import (SYSTEMS, CoefficientSet, GradeViolation, LaxTerm, SingularGauge, UnknownCoefficient,
                          build_lax, check_grading, g2_10_row_actions, gauge_transform, grade_components,
                          hermitian_conjugate, load_coefficients, random_constants, transpose_word, word_grade,
                          word_matrix, X, C)
from rank2lab.linalg import is_zero
from rank2lab.reps import grading_matrix, pair


def test_unknown_coefficient_name():
    with pytest.raises(UnknownCoefficient):
        CoefficientSet("A2-10", {"c7": [1]})


def test_unknown_system():
    with pytest.raises(ValueError):
        build_lax("D4-10", CoefficientSet.constants("A2-10", {}))


def test_grade_zero_must_be_red():
    co = CoefficientSet("A2-10", {"c1": [1]}, Azero={"Xm1": [1]})
    with pytest.raises(GradeViolation):
        build_lax("A2-10", co)
    # X-2 is red for the (1,0) grading
    build_lax("A2-10", CoefficientSet("A2-10", {"c1": [1]}, Azero={"Xm2": [1], "h1": [2]}))


def test_a2_10_single_term():
    co = CoefficientSet.constants("A2-10", {"cbar1": Fraction(3, 2), "c1": 1})
    lax = build_lax("A2-10", co)
    for i, rep in lax_reps("A2").items():
        assert is_zero(lax.Lplus[i] - Fraction(3, 2) * rep.X("+", 1))
        assert is_zero(lax.Lminus[i] - rep.X("-", 1))


def lax_reps(name):
    return pair(name)


def test_printed_factors():
    b201 = {t.coeff: t for t in SYSTEMS["B2-01"].lplus}
    assert b201["dbar3"].factor == Fraction(1, 2)
    assert b201["dbar3"].word == C(X("+", 1), C(X("+", 1), X("+", 2)))
    g201 = {t.coeff: t for t in SYSTEMS["G2-01"].lplus}
    assert g201["dbar^2"].factor == Fraction(1, 3)
    assert word_grade(g201["dbar^2"].word, (0, 1)) == 2


def test_hermitian_conjugate():
    term = LaxTerm("cbar2", Fraction(1), C(X("+", 2), X("+", 1)))
    (conj,) = hermitian_conjugate((term,))
    assert conj.coeff == "c2" and conj.word == C(X("-", 1), X("-", 2))
    for spec in SYSTEMS.values():
        assert hermitian_conjugate(hermitian_conjugate(spec.lplus)) == spec.lplus


@pytest.mark.parametrize("system", sorted(SYSTEMS))
def test_conjugate_is_matrix_transpose_in_orthogonal_basis(system):
    """In the Shapovalov-orthogonal basis, X-_i = N^-1 (X+_i)^T N with N the norm matrix."""
    spec = SYSTEMS[system]
    for rep in pair(spec.algebra).values():
        for t in spec.lplus:
            plus = word_matrix(t.word, rep)
            minus = word_matrix(transpose_word(t.word), rep)
            n = len(rep.norms)
            for r in range(n):
                for c in range(n):
                    assert minus[r, c] * rep.norms[r] == plus[c, r] * rep.norms[c]


@pytest.mark.parametrize("system", sorted(SYSTEMS))
def test_grading_of_built_operators(system):
    spec = SYSTEMS[system]
    co = random_constants(system, random.Random(1))
    lax = build_lax(system, co)
    check_grading(system, lax)
    for i, rep in pair(spec.algebra).items():
        H = grading_matrix(rep, spec.grading)
        plus = set(grade_components(lax.Lplus[i], H))
        minus = set(grade_components(lax.Lminus[i], H))
        assert plus <= set(spec.grades) and {-g for g in minus} <= set(spec.grades)
        assert {-g for g in minus} == plus


def test_grading_violation_detected():
    spec = SYSTEMS["A2-10"]
    lax = build_lax("A2-10", CoefficientSet.constants("A2-10", {"cbar1": 1}))
    lax.Lplus = {i: m + rep.X("+", 2) for (i, m), rep in zip(lax.Lplus.items(), pair("A2").values())}
    with pytest.raises(GradeViolation):
        check_grading(spec, lax)


def test_polynomial_coefficients():
    co = CoefficientSet("A2-10", {"cbar1": [1, 2, 3]})
    assert co.value("cbar1", Fraction(1, 2)) == Fraction(11, 4)
    assert not co.is_constant
    lax = build_lax("A2-10", co, y=2)
    assert is_zero(lax.Lplus[1] - 17 * pair("A2")[1].X("+", 1))


def test_gauge_identity_and_singular():
    u = [[Jet.const(Fraction(2)), Jet.const(Fraction(1))], [Jet.const(Fraction(3)), Jet.const(Fraction(5))]]
    one = [[1, 0], [0, 1]]
    v = gauge_transform(u, one, one)
    assert all(v[r][c].value == u[r][c].value for r in range(2) for c in range(2))
    with pytest.raises(SingularGauge):
        gauge_transform(u, [[1, 1], [1, 1]], one)


@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5), min_size=8, max_size=8))
@settings(max_examples=30, deadline=None)
def test_gauge_determinant_multiplicative(v):
    g = [[v[0], v[1]], [v[2], v[3]]]
    gb = [[v[4], v[5]], [v[6], v[7]]]
    u = [[Jet.const(Fraction(2)), Jet.const(Fraction(1, 3))], [Jet.const(Fraction(-1)), Jet.const(Fraction(5))]]
    if jdet2(g) == 0 or jdet2(gb) == 0:
        with pytest.raises(SingularGauge):
            gauge_transform(u, g, gb)
        return
    assert jdet2(gauge_transform(u, g, gb)).value == jdet2(u).value * jdet2(g) * jdet2(gb)


def test_g2_10_row_actions():
    for seed in range(3):
        co = random_constants("G2-10", random.Random(seed))
        values = {k: co.constant(k) for k in co.polys}
        assert all(is_zero(r) for r in g2_10_row_actions(values).values())


def test_load_coefficients(tmp_path):
    path = tmp_path / "a2.json"
    path.write_text(json.dumps({"system": "A2-10", "coeffs": {"c1": "1/2", "c2": [1, 2], "cbar1": 3, "cbar2": 0}}))
    co = load_coefficients(path)
    assert co.constant("c1") == Fraction(1, 2) and co.polys["c2"] == [1, 2]
    toml = tmp_path / "a2.toml"
    toml.write_text('system = "A2-10"\n[coeffs]\nc1 = 1\nc2 = 2\ncbar1 = 3\ncbar2 = 4\n')
    assert load_coefficients(toml).constant("cbar2") == 4


def test_load_coefficients_missing(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"system": "A2-10", "coeffs": {"c1": 1}}))
    with pytest.raises(UnknownCoefficient, match="cbar1"):
        load_coefficients(path)
