"""Ideals, membership witnesses, quadratic rank, Milnor numbers."""

import random
from fractions import Fraction

import pytest

from lctlab.jacobian import (
    IdealGens,
    Inconclusive,
    MembershipWitness,
    NonIsolated,
    NotMember,
    check_milnor_inequality,
    ideal_D,
    ideal_power,
    ideal_product,
    ideal_sum,
    jacobian_ideal,
    membership_truncated,
    milnor_number,
    quadratic_rank,
)
from lctlab.polyring import Polynomial, parse_poly, poly_to_string


def P(text, nvars):
    return parse_poly(text, nvars)


def gens_strings(a):
    return [poly_to_string(g) for g in a.gens]


# ---------------------------------------------------------------- jacobian_ideal


def test_jacobian_diagonal():
    J = jacobian_ideal(P("x^3 + y^3", 2))
    assert gens_strings(J) == ["3*x1^2", "3*x2^2"]


def test_jacobian_two_by_two_determinant():
    J = jacobian_ideal(P("x1*x4 - x2*x3", 4))
    assert gens_strings(J) == ["x4", "-x3", "-x2", "x1"]


def test_jacobian_linear_form_gives_unit():
    J = jacobian_ideal(P("x", 2))
    assert J.gens[0] == Polynomial.constant(2, 1)
    with pytest.raises(ValueError):
        jacobian_ideal(Polynomial.zero(2))


# ---------------------------------------------------------------- ideal_D


def test_ideal_D_principal_is_f_plus_jacobian():
    f = P("x^2 + y^3", 2)
    D = ideal_D(IdealGens(2, [f]))
    assert [g.terms for g in D.gens] == [
        f.terms,
        P("2*x", 2).terms,
        P("3*y^2", 2).terms,
    ]


def test_ideal_D_prunes_monomials():
    D = ideal_D(IdealGens(2, [P("x^3", 2), P("y^3", 2)]))
    assert gens_strings(D) == ["3*x1^2", "3*x2^2"]
    D = ideal_D(IdealGens(2, [P("x*y", 2)]))
    assert gens_strings(D) == ["x1", "x2"]


def test_ideal_D_is_a_closure_operation_on_monomials():
    # adding the squared derived ideal then deriving again changes nothing
    corpus = [
        IdealGens(2, [P("x^3", 2), P("y^3", 2)]),
        IdealGens(2, [P("x^2*y^2", 2)]),
        IdealGens(1, [P("x^4", 1)]),
        IdealGens(2, [P("x^5", 2), P("y^2", 2)]),
        IdealGens(3, [P("x1^4", 3), P("x2^4", 3), P("x3^4", 3)]),
    ]
    for a in corpus:
        closure = ideal_sum(a, ideal_power(ideal_D(a), 2))
        lhs = {next(iter(g.terms)) for g in ideal_D(closure).gens}
        rhs = {next(iter(g.terms)) for g in ideal_D(a).gens}
        assert lhs == rhs, str(a)


# ---------------------------------------------------------------- products and sums


def test_product_and_sum_examples():
    x = IdealGens(2, [P("x", 2)])
    y = IdealGens(2, [P("y", 2)])
    assert gens_strings(ideal_product(x, y)) == ["x1*x2"]
    J2 = ideal_power(jacobian_ideal(P("x^3+y^3", 2)), 2)
    assert gens_strings(J2) == ["9*x1^4", "9*x1^2*x2^2", "9*x2^4"]
    s = ideal_sum(
        IdealGens(2, [P("x^3", 2), P("y^3", 2)]), IdealGens(2, [P("x^2*y^2", 2)])
    )
    assert gens_strings(s) == ["x1^3", "x2^3", "x1^2*x2^2"]


# ---------------------------------------------------------------- membership


def test_membership_witness_simple():
    w = membership_truncated(P("x^4", 1), IdealGens(1, [P("x^2", 1)]), 8)
    assert isinstance(w, MembershipWitness)
    assert w.verify()
    assert w.coefficients[0].poly == P("x^2", 1)


def test_membership_degree_obstruction():
    res = membership_truncated(P("x", 1), IdealGens(1, [P("x^2", 1)]), 4)
    assert isinstance(res, NotMember)
    assert res.order == 4


def test_membership_in_jacobian_square():
    J2 = ideal_power(jacobian_ideal(P("x^3+y^3", 2)), 2)
    w = membership_truncated(P("x^2*y^2", 2), J2, 10)
    assert isinstance(w, MembershipWitness)
    assert w.verify()
    # the cross generator is 9 x^2 y^2, so the coefficient is 1/9
    assert w.coefficients[1].poly == Polynomial.constant(2, Fraction(1, 9))


def test_membership_min_degree_constraint():
    a = IdealGens(1, [P("x^2", 1)])
    w = membership_truncated(P("x^3", 1), a, 8, min_degree=1)
    assert isinstance(w, MembershipWitness) and w.verify()
    res = membership_truncated(P("x^2", 1), a, 8, min_degree=1)
    assert isinstance(res, NotMember)


def test_jacobian_stability_under_square_perturbation():
    # each partial of f+g is in J_f at truncated order, and conversely
    f = P("x^3 + y^3 + x^2*y", 2)
    Jf = jacobian_ideal(f)
    g = P("x^2*y^2", 2)  # in J_f^2 up to the witness above times units
    order = 8
    fg = f + g
    Jfg = jacobian_ideal(fg)
    for dg in Jfg.gens:
        assert isinstance(membership_truncated(dg, Jf, order - 2), MembershipWitness)
    for df in Jf.gens:
        assert isinstance(membership_truncated(df, Jfg, order - 2), MembershipWitness)


# ---------------------------------------------------------------- quadratic rank


def test_quadratic_rank_examples():
    assert quadratic_rank(P("x^2 + y^2", 2)) == 2
    assert quadratic_rank(P("x*y", 2)) == 2
    assert quadratic_rank(P("x^3", 2)) == 0
    with pytest.raises(ValueError):
        quadratic_rank(P("x + x^2", 2))


def test_quadratic_rank_invariant_under_linear_change():
    from lctlab.equiv import CoordinateMap

    rng = random.Random(5)
    f = P("x^2 + 3*x*y - y^2 + x^3", 2)
    base = quadratic_rank(f)
    for _ in range(5):
        while True:
            mat = [[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)]
            if mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0] != 0:
                break
        cmap = CoordinateMap.linear(mat, 10)
        assert quadratic_rank(cmap.apply(f).poly) == base


# ---------------------------------------------------------------- Milnor numbers


def test_milnor_basic_values():
    assert milnor_number(P("x^2 + y^2", 2)) == 1
    assert milnor_number(P("x^3 + y^3", 2)) == 4
    assert milnor_number(P("x^2 + y^3", 2)) == 2  # quotient basis {1, y}


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_milnor_homogeneous_grid(n, d):
    f = Polynomial.zero(n)
    for i in range(1, n + 1):
        f = f + Polynomial.variable(n, i) ** d
    assert milnor_number(f) == (d - 1) ** n


def test_milnor_non_isolated():
    assert isinstance(milnor_number(P("x^2*y^2", 2)), NonIsolated)


def test_milnor_preconditions():
    with pytest.raises(ValueError):
        milnor_number(Polynomial.zero(2))
    with pytest.raises(ValueError):
        milnor_number(P("1 + x^2", 2))
    with pytest.raises(ValueError):
        milnor_number(P("x + y^2", 2))


def test_milnor_inequality_reports():
    rep = check_milnor_inequality(P("x^2 + y^2", 2), Fraction(2, 2))
    assert rep.value == 1 and rep.bound == 1 and rep.equality
    rep = check_milnor_inequality(P("x^3 + y^3", 2), Fraction(2, 3))
    assert rep.value == Fraction(16, 9) and rep.holds and not rep.equality
    f3 = P("x1^4 + x2^4 + x3^4", 3)
    rep = check_milnor_inequality(f3, Fraction(3, 4))
    assert rep.value == Fraction(729, 64) and rep.bound == Fraction(27, 8)
    assert rep.holds
