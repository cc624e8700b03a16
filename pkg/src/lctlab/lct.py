"""Exact log canonical thresholds and Bernstein-Sato root tables.

Three independent computations live here:

* :func:`newton_lct`: the threshold of a monomial ideal from its Newton
  polyhedron, by exact rational linear programming (Fourier-Motzkin
  elimination; the dimensions are tiny, so no pivoting heuristics are
  needed and every step is certified rational arithmetic);

* :func:`lct_diag_fJ2` and :func:`lct_det_fJ2`: closed-form thresholds of
  the ideal (f) + J_f^2 for the diagonal family x_1^d + ... + x_n^d and for
  the generic n x n determinant, each returned with the ray or partition
  witness achieving the minimum and cross-checkable by re-evaluation;

* :func:`yano_roots` / :func:`det_roots`: root multisets of the reduced
  Bernstein-Sato polynomials of the two families, from which the minimal
  exponents n/d and 2 are read off.

General thresholds (arbitrary non-monomial ideals) are deliberately not
computed: they require resolutions, which are out of scope.  The consistency
checks at the bottom compare the two family computations against each other
and against the minimal exponents, in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from .jacobian import IdealGens, ideal_D, ideal_power, ideal_sum


# ----------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class RayValuation:
    """A monomial valuation given by a primitive non-negative weight vector."""

    weights: tuple

    def __post_init__(self):
        w = tuple(int(v) for v in self.weights)
        if not w or all(v == 0 for v in w):
            raise ValueError("weights must be nonzero")
        if any(v < 0 for v in w):
            raise ValueError("weights must be non-negative")
        g = 0
        for v in w:
            g = gcd(g, v)
        if g != 1:
            raise ValueError("weights must be primitive (gcd 1)")
        object.__setattr__(self, "weights", w)

    def log_discrepancy(self) -> int:
        return sum(self.weights)

    def ord_monomial(self, mono) -> int:
        return sum(w * e for w, e in zip(self.weights, mono))

    def ord_ideal(self, a: IdealGens) -> int:
        return min(self.ord_monomial(m) for m in a.exponents())


@dataclass(frozen=True)
class BlowupRayWitness:
    """Witness ray (a, b) in the blow-up coordinates used for the diagonal
    family: a is the order along the strict transform direction, b along the
    exceptional divisor."""

    a: int
    b: int


@dataclass(frozen=True)
class PartitionWitness:
    """Witness partition for the determinantal family's orbit minimization."""

    lam: tuple


@dataclass(frozen=True)
class LctCertificate:
    value: Fraction
    witness: object
    bound_proof: str

    def check(self, context) -> bool:
        """Re-evaluate the defining ratio at the witness; exact equality."""
        w = self.witness
        if isinstance(w, BlowupRayWitness):
            n, d = context
            denom = min(d * w.b + w.a, (2 * d - 2) * w.b)
            return Fraction(n * w.b + w.a, denom) == self.value
        if isinstance(w, PartitionWitness):
            lam = w.lam
            codim = sum(l * (2 * i + 1) for i, l in enumerate(lam))
            denom = min(sum(lam), 2 * sum(lam[1:]))
            return Fraction(codim, denom) == self.value
        if isinstance(w, RayValuation):
            a = context
            return Fraction(w.log_discrepancy(), w.ord_ideal(a)) == self.value
        return False


# ----------------------------------------------------------------------
# Fourier-Motzkin elimination over exact rationals


def _fm_normalize(ineq):
    """Scale an inequality (coeffs, const) meaning sum(c*x) <= const so the
    first nonzero coefficient has absolute value 1 (dedup helper)."""
    coeffs, const = ineq
    lead = next((c for c in coeffs if c), None)
    if lead is None:
        return ineq
    s = abs(lead)
    return tuple(c / s for c in coeffs), const / s


def fourier_motzkin_minimize(num_vars: int, inequalities, objective_var: int):
    """Minimize x_objective subject to linear inequalities sum(c x) <= const.

    Eliminates every other variable in turn, then reads the sharpest lower
    bound on the objective.  Exact; raises if the system is infeasible or
    the objective unbounded below.
    """
    ineqs = [
        (tuple(Fraction(c) for c in coeffs), Fraction(const))
        for coeffs, const in inequalities
    ]
    for var in range(num_vars):
        if var == objective_var:
            continue
        pos, neg, rest = [], [], []
        for coeffs, const in ineqs:
            c = coeffs[var]
            if c > 0:
                pos.append((coeffs, const))
            elif c < 0:
                neg.append((coeffs, const))
            else:
                rest.append((coeffs, const))
        new = rest
        for pc, pconst in pos:
            for nc, nconst in neg:
                # combine to cancel var: scale pos by -nc[var], neg by pc[var]
                a = -nc[var]
                b = pc[var]
                coeffs = tuple(a * u + b * v for u, v in zip(pc, nc))
                new.append((coeffs, a * pconst + b * nconst))
        seen = set()
        ineqs = []
        for ineq in new:
            key = _fm_normalize(ineq)
            if key not in seen:
                seen.add(key)
                ineqs.append(ineq)
    lower = None
    for coeffs, const in ineqs:
        c = coeffs[objective_var]
        if c == 0:
            if const < 0:
                raise ValueError("infeasible system")
            continue
        if c < 0:
            # -x <= const / |c|  =>  x >= -const/|c|
            bound = const / c
            if lower is None or bound > lower:
                lower = bound
    if lower is None:
        raise ValueError("objective is unbounded below")
    return lower


def newton_lct(a: IdealGens):
    """Log canonical threshold of a monomial ideal via its Newton polyhedron.

    Returns 1/t* where t* is the smallest t with t*(1,..,1) inside the
    convex hull of the exponent vectors plus the non-negative orthant.
    Unit ideals give the +inf sentinel.
    """
    if not a.is_monomial():
        raise ValueError("newton_lct needs a monomial ideal")
    if a.is_zero():
        raise ValueError("newton_lct needs a nonzero ideal")
    exps = a.exponents()
    if any(sum(e) == 0 for e in exps):
        return math.inf  # unit ideal
    n = a.nvars
    r = len(exps)
    # variables: mu_1..mu_{r-1}, t  (mu_r = 1 - sum of the others)
    num_vars = r  # r-1 mus and t at index r-1
    t_idx = r - 1
    ineqs = []
    for j in range(r - 1):
        coeffs = [Fraction(0)] * num_vars
        coeffs[j] = Fraction(-1)
        ineqs.append((coeffs, Fraction(0)))  # -mu_j <= 0
    coeffs = [Fraction(1)] * (r - 1) + [Fraction(0)]
    ineqs.append((coeffs, Fraction(1)))  # sum mu_j <= 1  (mu_r >= 0)
    last = exps[-1]
    for i in range(n):
        # sum_j mu_j (v_j_i - v_r_i) + v_r_i <= t
        coeffs = [Fraction(exps[j][i] - last[i]) for j in range(r - 1)]
        coeffs.append(Fraction(-1))
        ineqs.append((tuple(coeffs), Fraction(-last[i])))
    t_star = fourier_motzkin_minimize(num_vars, ineqs, t_idx)
    return Fraction(1) / t_star


def newton_lct_witness_ray(a: IdealGens, weight_bound: int):
    """Search primitive rays with entries <= weight_bound realizing the
    smallest log-discrepancy to order ratio.  Independent of the LP route;
    used to cross-check newton_lct."""
    from itertools import product as iproduct

    best = None
    best_ray = None
    n = a.nvars
    for w in iproduct(range(weight_bound + 1), repeat=n):
        if all(v == 0 for v in w):
            continue
        g = 0
        for v in w:
            g = gcd(g, v)
        if g != 1:
            continue
        ray = RayValuation(w)
        o = ray.ord_ideal(a)
        if o == 0:
            continue
        val = Fraction(ray.log_discrepancy(), o)
        if best is None or val < best:
            best = val
            best_ray = ray
    return best, best_ray


# ----------------------------------------------------------------------
# the two families


def lct_diag_fJ2(n: int, d: int) -> LctCertificate:
    """Threshold of (f) + J_f^2 for f = x_1^d + ... + x_n^d.

    The minimization over rays (a, b) is piecewise linear after scaling b to
    1: for a <= d-2 the order is d*b + a, beyond it the Jacobian-square term
    (2d-2)*b takes over, so the minimum is attained at a = 0 or a = d - 2.
    The result is min((n+d-2)/(2d-2), n/d), returned with the witness ray.
    """
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    candidates = []
    for a in (0, d - 2):
        denom = min(d + a, 2 * d - 2)
        candidates.append((Fraction(n + a, denom), BlowupRayWitness(a, 1)))
    value, witness = min(candidates, key=lambda t: (t[0], t[1].a))
    closed = min(Fraction(n + d - 2, 2 * d - 2), Fraction(n, d))
    if value != closed:
        raise AssertionError("piecewise minimization disagrees with closed form")
    cert = LctCertificate(
        value=value,
        witness=witness,
        bound_proof=(
            "scale-invariant in (a,b); on b=1 the objective is monotone on "
            "both sides of the breakpoint a = d-2, so the endpoints a in "
            "{0, d-2} exhaust the minimum"
        ),
    )
    assert cert.check((n, d))
    return cert


def lct_diag_bruteforce(n: int, d: int, bound: int = 50) -> Fraction:
    """Independent check: minimize over integer rays (a, b) <= bound directly."""
    best = None
    for b in range(1, bound + 1):
        for a in range(0, bound + 1):
            denom = min(d * b + a, (2 * d - 2) * b)
            val = Fraction(n * b + a, denom)
            if best is None or val < best:
                best = val
    return best


def _partitions_bounded(n_parts: int, total: int):
    """Weakly decreasing non-negative integer tuples of given length with
    sum <= total (and at least the first two entries positive)."""

    def rec(i, prev, remaining, acc):
        if i == n_parts:
            yield tuple(acc)
            return
        for v in range(min(prev, remaining), -1, -1):
            acc.append(v)
            yield from rec(i + 1, v, remaining - v, acc)
            acc.pop()

    yield from rec(0, total, total, [])


def lct_det_fJ2(n: int) -> LctCertificate:
    """Threshold of (f) + J_f^2 for the generic n x n determinant: exactly 2.

    Minimizes codim / min(ord_f, 2 ord_J) over matrix-orbit partitions with
    at least two parts, by enumerating the scale slice sum(lambda) <= 4n and
    certifying the lower bound 2 symbolically (see _det_lower_bound_argument).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    bound = 4 * n
    best = None
    best_lam = None
    for lam in _partitions_bounded(n, bound):
        if lam[1] == 0:
            continue
        codim = sum(l * (2 * i + 1) for i, l in enumerate(lam))
        denom = min(sum(lam), 2 * sum(lam[1:]))
        val = Fraction(codim, denom)
        if best is None or val < best or (val == best and lam < best_lam):
            best = val
            best_lam = lam
    if not _det_lower_bound_argument(n):
        raise AssertionError("symbolic lower bound failed")
    if best != 2:
        raise AssertionError(f"enumeration found {best}, expected 2")
    cert = LctCertificate(
        value=Fraction(2),
        witness=PartitionWitness(best_lam),
        bound_proof=(
            f"enumeration over the slice sum(lambda) <= {bound} plus the "
            "symbolic bound codim >= 2*min(ord_f, 2 ord_J) valid for every "
            "partition"
        ),
    )
    assert cert.check(None)
    return cert


def _det_lower_bound_argument(n: int) -> bool:
    """Coefficient-level proof that every admissible partition has ratio >= 2.

    Case ord = 2*sum_{i>=2}: codim - 4*sum_{i>=2} = lam_1 - lam_2 +
    sum_{i>=3}(2i-5) lam_i >= 0 since lam_1 >= lam_2 and 2i-5 >= 1 for i>=3.
    Case ord = sum(lam) (so lam_1 <= sum_{i>=2}): codim - 2*sum =
    -lam_1 + sum_{i>=2}(2i-3) lam_i >= -lam_1 + sum_{i>=2} lam_i >= 0
    since 2i-3 >= 1 for i >= 2.
    """
    for i in range(3, n + 1):
        if 2 * i - 5 < 1:
            return False
    for i in range(2, n + 1):
        if 2 * i - 3 < 1:
            return False
    return True


# ----------------------------------------------------------------------
# Bernstein-Sato root tables


@dataclass
class BSRootTable:
    """Multiset of the negated roots of the reduced Bernstein-Sato polynomial
    (the factor (s+1) removed), with the minimal exponent."""

    roots: dict  # Fraction -> multiplicity
    min_exponent: Fraction

    @property
    def size(self) -> int:
        return sum(self.roots.values())

    def sorted_roots(self):
        return sorted(self.roots.items())


def yano_roots(n: int, d: int) -> BSRootTable:
    """Roots for the diagonal family: all sums b_1/d + ... + b_n/d with
    1 <= b_i <= d-1, counted with multiplicity ((d-1)^n in total); the
    minimal exponent is n/d.

    Computed by convolving the count vector of one variable n times, so the
    table costs O(n^2 d^2) regardless of (d-1)^n.
    """
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    counts = {0: 1}
    for _ in range(n):
        nxt = {}
        for s, c in counts.items():
            for b in range(1, d):
                nxt[s + b] = nxt.get(s + b, 0) + c
        counts = nxt
    roots = {Fraction(s, d): c for s, c in sorted(counts.items())}
    table = BSRootTable(roots=roots, min_exponent=Fraction(n, d))
    if table.size != (d - 1) ** n:
        raise AssertionError("root count mismatch")
    if min(roots) != table.min_exponent:
        raise AssertionError("minimal root mismatch")
    return table


def det_roots(n: int) -> BSRootTable:
    """Roots for the generic determinant: 2, 3, ..., n after removing the
    (s+1) factor; the minimal exponent is 2."""
    if n < 2:
        raise ValueError("need n >= 2")
    roots = {Fraction(i): 1 for i in range(2, n + 1)}
    return BSRootTable(roots=roots, min_exponent=Fraction(2))


# ----------------------------------------------------------------------
# consistency checks


@dataclass
class FamilyReport:
    """Exact invariants of one family member and the regime booleans."""

    family: str
    params: dict
    alpha_tilde: Fraction
    lct_f: Fraction
    lct_fJ2: Fraction
    inequality_holds: bool  # alpha_tilde >= lct(f, J_f^2)
    equality: bool
    strict: bool
    lct_fJ2_above_one: bool
    regime_consistent: bool

    def as_row(self) -> dict:
        row = {"family": self.family}
        row.update(self.params)
        row.update(
            {
                "alpha": str(self.alpha_tilde),
                "lct_f": str(self.lct_f),
                "lct_fJ2": str(self.lct_fJ2),
                "ineq": self.inequality_holds,
                "equality": self.equality,
                "strict": self.strict,
                "above_one": self.lct_fJ2_above_one,
                "consistent": self.regime_consistent,
            }
        )
        return row


def check_theorems(family: str, n: int, d: Optional[int] = None) -> FamilyReport:
    """Compare the minimal exponent with lct(f, J_f^2) on one family member.

    For the diagonal family the expected regimes are: equality exactly when
    d = 2 or d >= n, strict inequality exactly when 3 <= d < n, and
    lct(f, J_f^2) > 1 exactly when d < n.  For the determinantal family both
    invariants equal 2.  All comparisons are exact rationals.
    """
    if family == "diagonal":
        if d is None:
            raise ValueError("diagonal family needs d")
        alpha = Fraction(n, d)
        cert = lct_diag_fJ2(n, d)
        lct_fj2 = cert.value
        params = {"n": n, "d": d}
        expected_equal = d == 2 or d >= n
        expected_strict = 3 <= d < n
        expected_above = d < n
    elif family == "determinantal":
        alpha = det_roots(n).min_exponent
        cert = lct_det_fJ2(n)
        lct_fj2 = cert.value
        params = {"n": n}
        expected_equal = True
        expected_strict = False
        expected_above = True
    else:
        raise ValueError(f"unknown family {family!r}")
    lct_f = min(alpha, Fraction(1))
    equality = alpha == lct_fj2
    strict = alpha > lct_fj2
    above = lct_fj2 > 1
    consistent = (
        alpha >= lct_fj2
        and equality == expected_equal
        and strict == expected_strict
        and above == expected_above
        and (above or lct_fj2 == lct_f)
    )
    return FamilyReport(
        family=family,
        params=params,
        alpha_tilde=alpha,
        lct_f=lct_f,
        lct_fJ2=lct_fj2,
        inequality_holds=alpha >= lct_fj2,
        equality=equality,
        strict=strict,
        lct_fJ2_above_one=above,
        regime_consistent=consistent,
    )


@dataclass
class CorDReport:
    """Outcome of the derived-ideal closure check on one monomial ideal."""

    ideal: str
    lct_a: object
    lct_closure: Optional[Fraction]
    equal: Optional[bool]
    skipped: bool
    note: str = ""


def check_corD(a: IdealGens) -> CorDReport:
    """Check lct(a + D(a)^2) == lct(a) for a monomial ideal with lct < 1.

    Ideals with lct >= 1 fall outside the hypothesis and are skipped with a
    notice rather than failed.
    """
    base = newton_lct(a)
    if base == math.inf or base >= 1:
        return CorDReport(
            ideal=str(a),
            lct_a=base,
            lct_closure=None,
            equal=None,
            skipped=True,
            note="hypothesis lct < 1 not met; skipped",
        )
    closure = ideal_sum(a, ideal_power(ideal_D(a), 2))
    val = newton_lct(closure)
    return CorDReport(
        ideal=str(a),
        lct_a=base,
        lct_closure=val,
        equal=val == base,
        skipped=False,
    )
