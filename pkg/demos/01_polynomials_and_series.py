"""Exact polynomials and truncated power series: a quick tour.

Everything in lctlab is exact rational arithmetic; series are polynomial
representatives modulo m^N where m = (x1, ..., xn).
"""

from fractions import Fraction

from lctlab import (
    Polynomial,
    TruncatedSeries,
    divided_power,
    multiplicity,
    parse_poly,
    poly_to_string,
    series_inverse,
    series_sqrt,
    substitute,
)

# Polynomials parse from a small strict grammar; x y z w name the first
# four variables, x1, x2, ... work in any dimension.
f = parse_poly("x^3 - 3*x*y + 1/2*y^2", 2)
print("f               =", poly_to_string(f))
print("f(2, 3)         =", f(2, 3))
print("multiplicity(f) =", multiplicity(f))

# Arithmetic is operator-based and exact.
g = parse_poly("(x + y)^2", 2)
print("\ng        =", g)
print("f * g    =", f * g)

# Divided powers D^alpha are derivatives divided by factorials, defined via
# binomial coefficients so integer coefficients stay integers.
print("\nD^(1,1) f =", divided_power(f, (1, 1)))
print("D^(2,0) f =", divided_power(f, (2, 0)))

# Substitution composes f with series images of the variables, truncated.
x = Polynomial.variable(2, 1)
y = Polynomial.variable(2, 2)
shifted = substitute(f, [x + y * y, y], 6)
print("\nf(x + y^2, y) mod m^6 =", shifted)

# The divided-power Taylor formula: f(u + v) = sum_alpha D^alpha f(u) v^alpha.
# Check one instance exactly.
u = [x * 2, y]
v = [y * y, x * x * 3]
lhs = substitute(f, [a + b for a, b in zip(u, v)], 6)
rhs = Polynomial.zero(2)
for a1 in range(4):
    for a2 in range(4):
        dp = divided_power(f, (a1, a2))
        if dp.is_zero():
            continue
        term = substitute(dp, u, 6).poly
        term = term.mul_truncated(v[0].pow_truncated(a1, 6), 6)
        term = term.mul_truncated(v[1].pow_truncated(a2, 6), 6)
        rhs = rhs + term
print("\nTaylor identity holds:", lhs.poly == rhs.truncate(6))

# Unit series have square roots and reciprocals at any truncation order.
s = TruncatedSeries(parse_poly("1 + x", 1), 6)
root = series_sqrt(s)
print("\nsqrt(1 + x) mod m^6 =", root)
print("square of that      =", root * root)
print("1/(1 + x) mod m^6   =", series_inverse(s))

# A series that vanishes identically only certifies multiplicity >= order.
print("\nmultiplicity of the zero series mod m^9:", multiplicity(TruncatedSeries.zero(1, 9)))
