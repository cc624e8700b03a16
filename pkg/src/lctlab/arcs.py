"""Jet enumeration over prime fields and contact-locus counting.

A jet of order m assigns to each of the n coordinates a polynomial of
degree <= m in t with coefficients mod p; the contact order of an ideal
along the jet is the t-adic order of its generators evaluated on the jet.
Counts are exact integers from full enumeration with early pruning: the
t^j coefficient of g(jet) only depends on the jet coefficients of degree
<= j, so levels are fixed one t-degree at a time and a subtree dies as soon
as a required coefficient is nonzero.  Once every required coefficient has
been checked, the remaining levels are free and counted as a power of p.

The closed-form orbit invariants of the determinantal family live here too,
since they are what the contact-locus counts get compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

from .budget import check_budget
from .jacobian import IdealGens
from .polyring import Polynomial


@dataclass(frozen=True)
class JetPoint:
    """An order-m jet: one coefficient tuple (length m+1, reduced mod p) per
    coordinate."""

    p: int
    m: int
    coords: tuple  # n tuples of m+1 coefficients each

    def __post_init__(self):
        coords = tuple(
            tuple(int(c) % self.p for c in coeffs) for coeffs in self.coords
        )
        for coeffs in coords:
            if len(coeffs) != self.m + 1:
                raise ValueError("each coordinate needs m + 1 coefficients")
        object.__setattr__(self, "coords", coords)

    @property
    def nvars(self) -> int:
        return len(self.coords)

    def contact_order(self, poly: Polynomial):
        """t-adic order of poly evaluated on the jet; m + 1 means the value
        is zero to the full truncation (order >= m + 1)."""
        vals = _poly_eval_jet(
            poly, [list(c) for c in self.coords], self.p, self.m + 1
        )
        for j, v in enumerate(vals):
            if v:
                return j
        return self.m + 1

    def contact_order_ideal(self, gens: "IdealGens"):
        return min(self.contact_order(g) for g in gens.gens)


@dataclass(frozen=True)
class OrbitInvariants:
    """Invariants of the matrix-jet orbit labeled by a partition.

    codim = sum(lam_i * (2i - 1)); the determinant vanishes to order
    sum(lam_i) along the orbit and the submaximal minors to order
    sum_{i >= 2}(lam_i).
    """

    lam: tuple
    codim: int
    ord_f: int
    ord_J: int

    @property
    def ord_fJ2(self) -> int:
        return min(self.ord_f, 2 * self.ord_J)


def orbit_invariants(lam) -> OrbitInvariants:
    lam = tuple(int(v) for v in lam)
    if any(v < 0 for v in lam):
        raise ValueError("partition entries must be non-negative")
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError("partition must be weakly decreasing")
    codim = sum(v * (2 * i + 1) for i, v in enumerate(lam))
    return OrbitInvariants(
        lam=lam,
        codim=codim,
        ord_f=sum(lam),
        ord_J=sum(lam[1:]),
    )


# ----------------------------------------------------------------------
# jet counting


def _poly_eval_jet(poly: Polynomial, coords, p: int, length: int):
    """Evaluate poly on a jet; coords are coefficient tuples of length
    `length`; returns the value's coefficients mod p, truncated to t^length."""
    out = [0] * length
    for mono, coeff in poly.terms.items():
        term = [1] + [0] * (length - 1)
        for var, e in enumerate(mono):
            for _ in range(e):
                nxt = [0] * length
                cv = coords[var]
                for i, a in enumerate(term):
                    if not a:
                        continue
                    for j in range(length - i):
                        b = cv[j]
                        if b:
                            nxt[i + j] = (nxt[i + j] + a * b) % p
                term = nxt
        c = int(coeff) % p
        if c:
            for i in range(length):
                if term[i]:
                    out[i] = (out[i] + c * term[i]) % p
    return out


def count_contact_jets(
    gens: IdealGens, p: int, m: int, e: int, budget=None
) -> int:
    """Number of order-m jets along which every generator vanishes to order
    >= e in t, over the field with p elements.  Exact.

    Requires e <= m + 1 and integer generator coefficients.  Enumeration is
    organized by t-degree level with pruning (see module docstring), so the
    worst case p^((m+1)n) is only reached for fully constrained ideals; the
    budget guards that worst case.
    """
    n = gens.nvars
    if e < 0 or e > m + 1:
        raise ValueError("need 0 <= e <= m + 1")
    for g in gens.gens:
        for c in g.terms.values():
            if not isinstance(c, int):
                raise ValueError("jet counting needs integer coefficients")
    check_budget(p ** ((m + 1) * n), budget, what="jet enumeration")
    if e == 0:
        return p ** ((m + 1) * n)

    polys = list(gens.gens)
    coords = [[0] * (m + 1) for _ in range(n)]

    # level ell fixes the t^ell coefficient of every coordinate; the t^ell
    # coefficient of g(jet) is final once levels <= ell are set, so each
    # level adds one vanishing constraint per generator (for ell < e)
    def level(ell: int) -> int:
        if ell >= e:
            return p ** (n * (m + 1 - ell))
        count = 0
        for combo in iter_product(range(p), repeat=n):
            for var in range(n):
                coords[var][ell] = combo[var]
            ok = True
            for g in polys:
                val = _poly_eval_jet(g, coords, p, ell + 1)
                if val[ell] != 0:
                    ok = False
                    break
            if ok:
                count += level(ell + 1)
        for var in range(n):
            coords[var][ell] = 0
        return count

    return level(0)


@dataclass
class CodimEstimate:
    """Least-squares slope of -log(density) against log p; labeled estimate,
    never exact."""

    estimate: float
    residual: float
    points: list


def empirical_codim(data, nvars: int, m: int) -> CodimEstimate:
    """Estimate the codimension of a contact locus from counts at several
    primes: density(p) ~ C * p^(-codim) to leading order.

    data: list of (p, count) at fixed (m, e).  Needs at least two primes.
    """
    if len(data) < 2:
        raise ValueError("need at least two (p, count) data points")
    pts = []
    for p, count in data:
        density = count / p ** ((m + 1) * nvars)
        if density <= 0:
            raise ValueError("empty contact locus; codimension is infinite")
        pts.append((math.log(p), -math.log(density)))
    # least squares for y = codim * x + c
    k = len(pts)
    sx = sum(x for x, _ in pts)
    sy = sum(y for _, y in pts)
    sxx = sum(x * x for x, _ in pts)
    sxy = sum(x * y for x, y in pts)
    denom = k * sxx - sx * sx
    slope = (k * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / k
    residual = max(abs(y - (slope * x + intercept)) for x, y in pts)
    return CodimEstimate(estimate=slope, residual=residual, points=data if isinstance(data, list) else list(data))
