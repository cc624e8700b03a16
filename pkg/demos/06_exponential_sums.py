"""Exponential sums modulo prime powers and their decay exponents.

The histogram of residues of f is computed exactly; floating point enters
only at the final evaluation against roots of unity.
"""

from fractions import Fraction

from lctlab import (
    IdealGens,
    decay_profile,
    exp_sum,
    exp_sum_restricted,
    igusa_identity_check,
    lct_diag_fJ2,
    count_solutions,
    parse_poly,
    residue_histogram,
)

# The classical quadratic sum: |E(p^m)| = p^(-m/2) for odd p.
f = parse_poly("x^2", 1)
for m in (1, 2, 3):
    e = exp_sum(f, 5, m)
    print(f"|E(5^{m})| for x^2 = {abs(e):.12f}   (5^(-{m}/2) = {5**(-m/2):.12f})")

# Histograms are exact integer counts per residue.
h = residue_histogram(f, 5, 1)
print("\nresidues of x^2 mod 5:", dict(enumerate(h.counts.tolist())))

# Restricting to a residue tube (x = 0 mod p here) keeps the normalization.
r = exp_sum_restricted(f, 5, 2, IdealGens(1, [parse_poly("x", 1)]))
print("restricted sum over x = 0 mod 5, level 2:", r)

# Solution counts modulo p^k come from the same histograms.
print("\nN_2(x^2, p=5) =", count_solutions(f, 5, 2))
print("N_1(x*y, p=3) =", count_solutions(parse_poly("x*y", 2), 3, 1))

# The restricted-sum identities: the tube sum equals its cut to the locus
# where f (and then the whole ideal (f) + J_f^2) vanishes to order m-1, and
# the half-level coset around any non-degenerate point sums to zero.
f2 = parse_poly("x^3 + y^3", 2)
z = IdealGens(2, [parse_poly("x", 2), parse_poly("y", 2)])
rep = igusa_identity_check(f2, 7, 3, z)
print(
    f"\nidentity checks at p=7 m=3: tube-vs-f {rep.efz1}, tube-vs-ideal {rep.efzj},"
    f" coset vanishing {rep.orth}"
)

# Decay: sigma_m = -log|E(p^m)| / (m log p) should stay above the threshold
# of (f) + J_f^2 minus a small slack (the bound's constant is unknown).
ref = lct_diag_fJ2(2, 3).value
prof = decay_profile(f2, 7, 4, lct_ref=ref)
print(f"\nthreshold reference = {ref}")
for m, s in sorted(prof.sigma.items()):
    print(f"  sigma_{m} = {s:.6f}")
print("levels flagged below the reference:", prof.flagged or "none")

# A smooth function has |E| = 0 beyond level 1: the sentinel is +inf.
prof = decay_profile(parse_poly("x", 1), 7, 3)
print("\nsigma for the smooth case:", prof.sigma)
