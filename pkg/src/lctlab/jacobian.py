"""Jacobian ideals, truncated ideal membership, Milnor numbers.

Ideals are plain generator lists.  Everything here reduces to exact linear
algebra over the rationals on finite-dimensional truncations of the local
ring at the origin:

* ``membership_truncated`` solves for series coefficients writing a target
  as a combination of the generators modulo ``m^N`` and returns a witness
  that re-expands exactly, or a definite failure at that order;
* ``milnor_number`` computes the colength of the Jacobian ideal by
  increasing the truncation order until the quotient dimension stabilizes,
  which is permanent in the complete local ring (if no degree-N monomial is
  independent modulo the ideal, multiplying by the maximal ideal shows the
  same for every higher degree, and the Krull intersection theorem finishes).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Sequence

from .linalg import SparseEliminator, rank_dense, solve_dense
from .polyring import (
    Polynomial,
    TruncatedSeries,
    partial_derivative,
    poly_to_string,
)


@dataclass(frozen=True)
class IdealGens:
    """A finite generator list; the order of generators is part of the value."""

    nvars: int
    gens: tuple

    def __init__(self, nvars: int, gens: Sequence[Polynomial]):
        gens = tuple(gens)
        if not gens:
            raise ValueError("an ideal needs at least one generator")
        for g in gens:
            if not isinstance(g, Polynomial):
                raise TypeError("generators must be Polynomial values")
            if g.nvars != nvars:
                raise ValueError("generator nvars mismatch")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "gens", gens)

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.gens)

    def is_monomial(self) -> bool:
        return all(len(g.terms) == 1 for g in self.gens if not g.is_zero())

    def exponents(self):
        """Exponent vectors of a monomial ideal's generators."""
        out = []
        for g in self.gens:
            if g.is_zero():
                continue
            (mono,) = g.terms
            out.append(mono)
        return out

    def __str__(self):
        return "(" + ", ".join(poly_to_string(g) for g in self.gens) + ")"


def _mono_divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _prune_monomial(gens):
    """Minimal generating monomials: drop any monomial another one divides.

    Only applies when every generator is a monomial; coefficients are units
    and ignored.  Output is sorted by (degree, grevlex) for determinism.
    """
    first_seen = {}
    for g in gens:
        if g.is_zero():
            continue
        (mono,) = g.terms
        first_seen.setdefault(mono, g)
    monos = set(first_seen)
    keep = [
        m for m in monos if not any(o != m and _mono_divides(o, m) for o in monos)
    ]
    keep.sort(key=lambda m: (sum(m), tuple(reversed(m))))
    return [first_seen[m] for m in keep]


def jacobian_ideal(f: Polynomial) -> IdealGens:
    """The ideal generated by all first partial derivatives, in variable order."""
    if f.is_zero():
        raise ValueError("the Jacobian ideal of the zero polynomial is undefined")
    return IdealGens(f.nvars, [partial_derivative(f, i) for i in range(1, f.nvars + 1)])


def ideal_D(a: IdealGens) -> IdealGens:
    """Generators of ``a`` together with all their partial derivatives.

    For a principal ideal (f) this is (f) + J_f.  Derivatives of arbitrary
    combinations h*g add nothing new modulo this ideal, by the Leibniz rule.
    """
    if a.is_zero():
        raise ValueError("ideal_D of the zero ideal is undefined")
    gens = list(a.gens)
    for g in a.gens:
        for i in range(1, a.nvars + 1):
            d = partial_derivative(g, i)
            if not d.is_zero():
                gens.append(d)
    if all(len(g.terms) == 1 for g in gens if not g.is_zero()):
        gens = _prune_monomial(gens)
    return IdealGens(a.nvars, gens)


def ideal_sum(a: IdealGens, b: IdealGens) -> IdealGens:
    if a.nvars != b.nvars:
        raise ValueError("nvars mismatch")
    gens = list(a.gens) + list(b.gens)
    if all(len(g.terms) == 1 for g in gens if not g.is_zero()):
        gens = _prune_monomial(gens)
    return IdealGens(a.nvars, gens)


def ideal_product(a: IdealGens, b: IdealGens) -> IdealGens:
    """Pairwise products of generators.

    For a*a only the unordered pairs are kept, in lexicographic (i, j) order
    with i <= j; downstream code relies on that ordering.
    """
    if a.nvars != b.nvars:
        raise ValueError("nvars mismatch")
    gens = []
    if a is b or a.gens == b.gens:
        for i in range(len(a.gens)):
            for j in range(i, len(a.gens)):
                gens.append(a.gens[i] * a.gens[j])
    else:
        for g in a.gens:
            for h in b.gens:
                gens.append(g * h)
    if all(len(g.terms) == 1 for g in gens if not g.is_zero()):
        gens = _prune_monomial(gens)
    return IdealGens(a.nvars, gens)


def ideal_power(a: IdealGens, k: int) -> IdealGens:
    if k < 1:
        raise ValueError("power must be >= 1")
    out = a
    for _ in range(k - 1):
        out = ideal_product(out, a)
    return out


# ----------------------------------------------------------------------
# truncated membership


@dataclass
class MembershipWitness:
    """Certificate that ``sum(coefficients[i] * gens[i]) == target mod m^order``."""

    target: Polynomial
    gens: IdealGens
    coefficients: list
    order: int

    def expand(self) -> Polynomial:
        total = Polynomial.zero(self.target.nvars)
        for h, g in zip(self.coefficients, self.gens.gens):
            total = total + h.poly.mul_truncated(g, self.order)
        return total

    def verify(self) -> bool:
        return self.expand() == self.target.truncate(self.order)


@dataclass
class NotMember:
    """Definite failure: the target is not in the ideal modulo m^order."""

    order: int
    reason: str = ""


def _monomials_below(nvars: int, order: int):
    out = []
    for mono in iter_product(*[range(order) for _ in range(nvars)]):
        if sum(mono) < order:
            out.append(mono)
    out.sort(key=lambda m: (sum(m), tuple(-e for e in reversed(m))))
    return out


def membership_truncated(
    g: Polynomial,
    a: IdealGens,
    order: int,
    min_degree: int = 0,
):
    """Write ``g`` as a combination of the generators modulo ``m^order``.

    Solves the exact linear system over the monomial basis of degree < order.
    ``min_degree`` restricts every coefficient series to multiplicity at
    least that value.  Returns a :class:`MembershipWitness` (whose expansion
    reproduces g exactly mod m^order) or :class:`NotMember`.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if g.nvars != a.nvars:
        raise ValueError("nvars mismatch")
    nvars = a.nvars
    target = g.truncate(order)
    columns = []  # (gen index, shift monomial, shifted terms)
    for gi, gen in enumerate(a.gens):
        if gen.is_zero():
            continue
        gmult = gen.multiplicity()
        for mono in _monomials_below(nvars, max(order - gmult, 0)):
            if sum(mono) < min_degree:
                continue
            shifted = {}
            for m, c in gen.terms.items():
                s = tuple(map(int.__add__, m, mono))
                if sum(s) < order:
                    shifted[s] = c
            if shifted:
                columns.append((gi, mono, shifted))
    row_keys = sorted(
        {m for _, _, sh in columns for m in sh} | set(target.terms),
        key=lambda m: (sum(m), tuple(-e for e in reversed(m))),
    )
    row_index = {m: i for i, m in enumerate(row_keys)}
    nrows, ncols = len(row_keys), len(columns)
    rows = [[0] * ncols for _ in range(nrows)]
    for j, (_, _, shifted) in enumerate(columns):
        for m, c in shifted.items():
            rows[row_index[m]][j] = c
    rhs = [target.terms.get(m, 0) for m in row_keys]
    if ncols == 0:
        if target.is_zero():
            coeffs = [TruncatedSeries.zero(nvars, order) for _ in a.gens]
            return MembershipWitness(target, a, coeffs, order)
        return NotMember(order, "no usable generator columns")
    sol = solve_dense(rows, rhs)
    if sol is None:
        return NotMember(order, "linear system inconsistent at this order")
    per_gen = {gi: {} for gi in range(len(a.gens))}
    for (gi, mono, _), value in zip(columns, sol):
        if value:
            per_gen[gi][mono] = value
    coeffs = [
        TruncatedSeries(Polynomial(nvars, per_gen[gi]), order)
        for gi in range(len(a.gens))
    ]
    witness = MembershipWitness(target, a, coeffs, order)
    assert witness.verify(), "membership witness failed to re-expand"
    return witness


# ----------------------------------------------------------------------
# quadratic rank and Milnor numbers


def quadratic_form_matrix(f: Polynomial):
    """Symmetric matrix of the degree-2 part; off-diagonal entries are halved."""
    n = f.nvars
    s = [[Fraction(0)] * n for _ in range(n)]
    for mono, coeff in f.graded_part(2).terms.items():
        idx = [i for i, e in enumerate(mono) for _ in range(e)]
        i, j = idx[0], idx[1]
        if i == j:
            s[i][i] = Fraction(coeff)
        else:
            s[i][j] = s[j][i] = Fraction(coeff, 2)
    return s


def quadratic_rank(f: Polynomial) -> int:
    """Rank over the rationals of the quadratic part of f.

    Requires f to vanish to order >= 2 at the origin (or be zero).
    """
    if not f.is_zero() and f.multiplicity() < 2:
        raise ValueError("quadratic_rank needs multiplicity >= 2")
    return rank_dense(quadratic_form_matrix(f))


class NonIsolated:
    """Marker: the singularity looks non-isolated (heuristic cutoff)."""

    def __repr__(self):
        return "NonIsolated"

    def __eq__(self, other):
        return isinstance(other, NonIsolated)

    def __hash__(self):
        return hash("NonIsolated")


@dataclass(frozen=True)
class Inconclusive:
    """The colength had not stabilized when the order cap was reached."""

    order_cap: int


def _colength(f: Polynomial, order: int) -> int:
    """dim of (monomials of degree < order) modulo truncations of m-multiples
    of the partial derivatives."""
    n = f.nvars
    partials = [partial_derivative(f, i) for i in range(1, n + 1)]
    elim = SparseEliminator()
    nmons = 0
    for mono in iter_product(*[range(order) for _ in range(n)]):
        if sum(mono) >= order:
            continue
        nmons += 1
        for p in partials:
            if p.is_zero():
                continue
            if sum(mono) + p.multiplicity() >= order:
                continue
            row = {}
            for m, c in p.terms.items():
                s = tuple(map(int.__add__, m, mono))
                if sum(s) < order:
                    row[s] = Fraction(c)
            if row:
                elim.add_row(row)
    return nmons - elim.rank


def milnor_number(f: Polynomial, order_cap: int = 64):
    """Colength of the Jacobian ideal at the origin.

    Computes the quotient dimension at increasing truncation orders and
    returns the value at the first repeat (stabilization is permanent, see
    module docstring).  Returns :class:`NonIsolated` when the dimension keeps
    growing past the heuristic cutoff, or :class:`Inconclusive` at the cap.
    """
    if f.is_zero():
        raise ValueError("milnor_number needs a nonzero input")
    if f.constant_term:
        raise ValueError("milnor_number needs f(0) = 0")
    if f.multiplicity() < 2:
        raise ValueError("milnor_number needs a singular point (multiplicity >= 2)")
    deg = int(f.total_degree())
    growth_streak = 0
    prev = None
    for order in range(2, order_cap + 1):
        cur = _colength(f, order)
        if prev is not None:
            if cur == prev:
                return prev
            if order > 2 * deg:
                growth_streak = growth_streak + 1 if cur > prev else 0
                if growth_streak >= 5:
                    return NonIsolated()
        prev = cur
    return Inconclusive(order_cap)


@dataclass
class MilnorInequalityReport:
    """Exact evaluation of the bound alpha^n * mu >= (n/2)^n."""

    mu: int
    alpha: Fraction
    value: Fraction
    bound: Fraction
    holds: bool
    equality: bool


def check_milnor_inequality(f: Polynomial, alpha) -> MilnorInequalityReport:
    """Check the minimal-exponent/Milnor-number inequality for an isolated
    singularity; alpha is supplied by the caller (closed forms live in the
    threshold module)."""
    mu = milnor_number(f)
    if not isinstance(mu, int):
        raise ValueError(f"milnor_number did not resolve to an integer: {mu!r}")
    n = f.nvars
    alpha = Fraction(alpha)
    value = alpha**n * mu
    bound = Fraction(n, 2) ** n
    return MilnorInequalityReport(
        mu=mu,
        alpha=alpha,
        value=value,
        bound=bound,
        holds=value >= bound,
        equality=value == bound,
    )
