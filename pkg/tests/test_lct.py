"""Thresholds: the Newton-polyhedron oracle, the two families, root tables."""

import math
from fractions import Fraction

import pytest

from lctlab.jacobian import IdealGens, ideal_power
from lctlab.lct import (
    check_corD,
    check_theorems,
    det_roots,
    lct_det_fJ2,
    lct_diag_bruteforce,
    lct_diag_fJ2,
    newton_lct,
    newton_lct_witness_ray,
    yano_roots,
)
from lctlab.polyring import Polynomial, parse_poly


def P(text, nvars):
    return parse_poly(text, nvars)


def ideal(nvars, *texts):
    return IdealGens(nvars, [P(t, nvars) for t in texts])


# ---------------------------------------------------------------- newton_lct


def test_newton_maximal_ideal():
    a = IdealGens(3, [Polynomial.variable(3, i) for i in (1, 2, 3)])
    assert newton_lct(a) == 3


def test_newton_principal_power():
    assert newton_lct(ideal(1, "x^4")) == Fraction(1, 4)


def test_newton_mixed_hull():
    # diagonal point (3/2, 3/2) sits on the hull segment of (3,0) and (0,3)
    assert newton_lct(ideal(2, "x^3", "y^3", "x^2*y^2")) == Fraction(2, 3)


def test_newton_unit_and_errors():
    assert newton_lct(IdealGens(2, [Polynomial.constant(2, 5)])) == math.inf
    with pytest.raises(ValueError):
        newton_lct(ideal(2, "x + y"))  # not monomial
    with pytest.raises(ValueError):
        newton_lct(IdealGens(1, [Polynomial.zero(1)]))


@pytest.mark.parametrize(
    "texts,nvars,expected",
    [
        (("x^3", "y^3"), 2, Fraction(2, 3)),
        (("x^2*y^2",), 2, Fraction(1, 2)),
        (("x^5", "y^2"), 2, Fraction(7, 10)),
        (("x^3*y",), 2, Fraction(1, 3)),
        (("x^4", "x*y^2", "y^4"), 2, Fraction(5, 8)),
        (("x1^4", "x2^4", "x3^4"), 3, Fraction(3, 4)),
    ],
)
def test_newton_against_ray_enumeration(texts, nvars, expected):
    a = ideal(nvars, *texts)
    lp_value = newton_lct(a)
    assert lp_value == expected
    bound = max(sum(m) for m in a.exponents()) + 2
    ray_value, ray = newton_lct_witness_ray(a, bound)
    assert ray_value == lp_value
    # the certificate self-verifies: value equals A(ray)/ord_ray(a)
    assert Fraction(ray.log_discrepancy(), ray.ord_ideal(a)) == lp_value


def test_newton_monotone_in_inclusion():
    small = ideal(2, "x^4", "y^4")
    big = ideal(2, "x^2", "y^4")  # contains the first (x^4 = (x^2)^2)
    assert newton_lct(small) <= newton_lct(big)


def test_newton_power_scaling():
    a = ideal(2, "x^2*y^2")
    assert newton_lct(ideal_power(a, 2)) == newton_lct(a) / 2
    b = ideal(2, "x^3", "y^3")
    assert newton_lct(ideal_power(b, 3)) == newton_lct(b) / 3


# ---------------------------------------------------------------- diagonal family


def test_diag_examples():
    c = lct_diag_fJ2(2, 5)
    assert c.value == Fraction(2, 5)
    assert (c.witness.a, c.witness.b) == (0, 1)
    c = lct_diag_fJ2(3, 2)
    assert c.value == Fraction(3, 2)
    c = lct_diag_fJ2(5, 3)
    assert c.value == Fraction(3, 2)
    assert (c.witness.a, c.witness.b) == (1, 1)


@pytest.mark.parametrize("n", range(2, 13))
@pytest.mark.parametrize("d", range(2, 13))
def test_diag_closed_form_grid(n, d):
    cert = lct_diag_fJ2(n, d)
    assert cert.value == min(Fraction(n + d - 2, 2 * d - 2), Fraction(n, d))
    assert cert.check((n, d))


def test_diag_brute_force_cross_check():
    for n in range(2, 9):
        for d in range(2, 9):
            assert lct_diag_bruteforce(n, d, 50) == lct_diag_fJ2(n, d).value


# ---------------------------------------------------------------- determinantal family


@pytest.mark.parametrize("n", range(2, 7))
def test_det_value_and_witness(n):
    cert = lct_det_fJ2(n)
    assert cert.value == 2
    assert cert.witness.lam == tuple([1, 1] + [0] * (n - 2))
    assert cert.check(None)


# ---------------------------------------------------------------- root tables


def test_yano_small_cases():
    t = yano_roots(1, 3)
    assert t.sorted_roots() == [(Fraction(1, 3), 1), (Fraction(2, 3), 1)]
    assert t.min_exponent == Fraction(1, 3)
    t = yano_roots(2, 2)
    assert t.sorted_roots() == [(Fraction(1), 1)]
    t = yano_roots(2, 3)
    assert t.sorted_roots() == [
        (Fraction(2, 3), 1),
        (Fraction(1), 2),
        (Fraction(4, 3), 1),
    ]
    assert t.min_exponent == Fraction(2, 3)


def test_yano_counts_scale():
    assert yano_roots(3, 4).size == 27
    assert yano_roots(8, 8).size == 7**8
    assert yano_roots(8, 8).min_exponent == 1


def test_det_roots_values():
    t = det_roots(3)
    assert t.sorted_roots() == [(Fraction(2), 1), (Fraction(3), 1)]
    assert t.min_exponent == 2
    assert det_roots(2).min_exponent == 2
    assert det_roots(5).min_exponent == 2


# ---------------------------------------------------------------- theorem checks


def test_check_theorems_examples():
    rep = check_theorems("diagonal", 4, 4)
    assert rep.alpha_tilde == 1 and rep.lct_fJ2 == 1 and rep.lct_f == 1
    assert rep.equality and not rep.lct_fJ2_above_one and rep.regime_consistent

    rep = check_theorems("diagonal", 4, 3)
    assert rep.alpha_tilde == Fraction(4, 3)
    assert rep.lct_fJ2 == Fraction(5, 4)
    assert rep.strict and rep.regime_consistent

    rep = check_theorems("determinantal", 3)
    assert rep.alpha_tilde == 2 == rep.lct_fJ2
    assert rep.regime_consistent


def test_check_theorems_full_grids():
    for n in range(2, 9):
        for d in range(2, 9):
            rep = check_theorems("diagonal", n, d)
            assert rep.inequality_holds
            assert rep.regime_consistent, (n, d)
            assert rep.strict == (3 <= d < n)
            assert rep.lct_fJ2_above_one == (d < n)
    for n in range(2, 7):
        assert check_theorems("determinantal", n).regime_consistent


# ---------------------------------------------------------------- corD


def test_corD_examples():
    rep = check_corD(ideal(2, "x^3", "y^3"))
    assert not rep.skipped
    assert rep.lct_a == Fraction(2, 3) and rep.lct_closure == Fraction(2, 3)
    assert rep.equal

    rep = check_corD(ideal(1, "x^4"))
    assert rep.lct_a == Fraction(1, 4) and rep.equal

    rep = check_corD(ideal(2, "x^2*y^2"))
    assert rep.lct_a == Fraction(1, 2) and rep.equal


def test_corD_skips_large_threshold():
    rep = check_corD(ideal(2, "x", "y"))
    assert rep.skipped and rep.equal is None
