"""Jets over prime fields: contact-locus counts and codimension estimates."""

from lctlab import (
    IdealGens,
    count_contact_jets,
    empirical_codim,
    orbit_invariants,
    parse_poly,
)

# A jet of order m is an n-tuple of polynomials in t of degree <= m with
# coefficients mod p; we count jets along which an ideal vanishes to order
# >= e in t.  For a coordinate function the count is a clean power of p.
a = IdealGens(1, [parse_poly("x", 1)])
for e in range(0, 4):
    print(f"coordinate function, p=5 m=2 e={e}: count = {count_contact_jets(a, 5, 2, e)}")

# The 2x2 generic determinant: at m=1, e=1 only the constant coefficients
# are constrained, to a singular matrix; there are p^3 + p^2 - p of those.
det = IdealGens(4, [parse_poly("x1*x4 - x2*x3", 4)])
print()
for p in (3, 5):
    count = count_contact_jets(det, p, 1, 1)
    print(
        f"determinant p={p}: count = {count} = p^4 * {count // p**4}"
        f"  (p^3+p^2-p = {p**3 + p**2 - p})"
    )

# Matrix-jet orbits are labeled by partitions; their codimension and contact
# orders have closed forms, and the threshold-2 witness is (1,1,0,...).
print()
for lam in ((1, 1), (2, 1, 0), (1, 0)):
    oi = orbit_invariants(lam)
    print(
        f"orbit {lam}: codim {oi.codim}, ord_f {oi.ord_f}, ord_J {oi.ord_J},"
        f" ord of (f,Jf^2) {oi.ord_fJ2}"
    )

# Densities across primes estimate the codimension of a contact locus:
# density(p) ~ C p^(-codim).  The coordinate case is exact; curved cases are
# reported as estimates only (the constant C may depend on p mod small
# numbers).
print()
data = [(p, count_contact_jets(a, p, 2, 2)) for p in (3, 5, 7)]
est = empirical_codim(data, 1, 2)
print(f"coordinate function codim estimate: {est.estimate:.6f} (residual {est.residual:.1e})")

data = [(p, count_contact_jets(det, p, 1, 1)) for p in (3, 5, 7)]
est = empirical_codim(data, 4, 1)
print(f"determinant contact codim estimate: {est.estimate:.4f} (leading order 1)")
