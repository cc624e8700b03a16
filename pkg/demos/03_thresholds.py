"""Log canonical thresholds: monomial oracle, the two families, consistency."""

from lctlab import (
    IdealGens,
    check_corD,
    check_theorems,
    det_roots,
    lct_det_fJ2,
    lct_diag_fJ2,
    newton_lct,
    parse_poly,
    yano_roots,
)

# Monomial ideals: the threshold comes from the Newton polyhedron, solved by
# exact rational linear programming.
for texts, nvars in ((("x^3", "y^3"), 2), (("x^2*y^2",), 2), (("x^5", "y^2"), 2)):
    a = IdealGens(nvars, [parse_poly(t, nvars) for t in texts])
    print(f"lct{a} =", newton_lct(a))

# Diagonal forms f = x1^d + ... + xn^d: the threshold of (f) + J_f^2 has the
# closed form min((n+d-2)/(2d-2), n/d), found here by an exact piecewise
# minimization with a ray witness.
print()
for n, d in ((2, 5), (3, 2), (5, 3), (4, 3)):
    cert = lct_diag_fJ2(n, d)
    print(f"diagonal n={n} d={d}: lct(f,Jf^2) = {cert.value}  witness (a,b)=({cert.witness.a},{cert.witness.b})")

# Generic determinants: the threshold is 2 for every matrix size, witnessed
# by the partition (1,1,0,...) in the orbit minimization.
print()
for n in (2, 3, 4):
    cert = lct_det_fJ2(n)
    print(f"determinant {n}x{n}: lct(f,Jf^2) = {cert.value}  witness {cert.witness.lam}")

# Reduced Bernstein-Sato roots of the same families; the smallest root is
# the minimal exponent: n/d for diagonal forms, 2 for determinants.
print()
t = yano_roots(2, 3)
print("diagonal n=2 d=3 roots:", t.sorted_roots(), " min =", t.min_exponent)
print("determinant 3x3 roots: ", det_roots(3).sorted_roots())

# The minimal exponent always bounds the threshold of (f) + J_f^2; equality
# and the rational-singularity regime switch exactly at d = n.
print()
for n, d in ((4, 4), (4, 3), (2, 5)):
    rep = check_theorems("diagonal", n, d)
    flavor = "equality" if rep.equality else "strict"
    print(
        f"n={n} d={d}: alpha = {rep.alpha_tilde}, lct(f,Jf^2) = {rep.lct_fJ2}"
        f"  [{flavor}; above 1: {rep.lct_fJ2_above_one}]"
    )

# Closure check: adding the squared derived ideal never changes a threshold
# below 1.
print()
for texts, nvars in ((("x^3", "y^3"), 2), (("x^2*y^2",), 2)):
    a = IdealGens(nvars, [parse_poly(t, nvars) for t in texts])
    rep = check_corD(a)
    print(f"{rep.ideal}: lct = {rep.lct_a}, after closure {rep.lct_closure}, equal: {rep.equal}")
