"""Constructive formal equivalence: Morse splitting and absorption.

Both constructions return explicit coordinate maps certified by direct
substitution at the requested truncation order.
"""

from lctlab import (
    TruncatedSeries,
    formal_equiv_rank2,
    ideal_power,
    jacobian_ideal,
    membership_truncated,
    morsify,
    parse_poly,
    tougeron,
    verify_map,
)

N = 10

# --- Morse splitting -------------------------------------------------------
# A multiplicity-2 germ splits as a diagonal quadratic form plus a residual
# in the remaining variables; completing the square does all the work.
f = parse_poly("x^2 + x*y^2", 2)
res = morsify(f, N)
print("f        =", f)
print("diagonal =", res.diag_coeffs)
print("residual =", res.residual.poly)
print("map      =", [str(im.poly) for im in res.map.images])
print("verified :", verify_map(f, res.normal_form(), res.map, N))

# The hyperbolic form x*y needs a linear change first; the package finds it.
g = parse_poly("x*y + y^3", 2)
res = morsify(g, N)
print(
    "\nx*y + y^3 splits with diagonal",
    [str(c) for c in res.diag_coeffs],
    "residual",
    res.residual.poly,
)

# --- absorption into the Jacobian square ----------------------------------
# For mult(f) >= 3 and any g in J_f^2, an explicit coordinate change maps f
# to f + g.  The witness comes from the truncated membership solver, and the
# map is built by a defect-squaring iteration (O(log N) steps).
f = parse_poly("x^3 + y^3", 2)
g = parse_poly("x^2*y^2", 2)
jf2 = ideal_power(jacobian_ideal(f), 2)
wit = membership_truncated(g, jf2, N)
psi = tougeron(f, wit, N)
print("\nabsorbing", g, "into", f)
print("map images:", [str(im.poly) for im in psi.images])
ok, _ = verify_map(f, TruncatedSeries(f + g, N), psi, N)
print("psi(f) == f + g mod m^N:", ok)

# --- multiplicity 2 with rank preservation ---------------------------------
# With a nondegenerate quadratic block, the same absorption works as long as
# the perturbed quadratic part keeps its rank; the diagonal coefficients may
# move, the residual does not.
f = parse_poly("x^2 + y^3", 2)
g = parse_poly("x^2", 2)  # in J_f^2 since (2x)^2 / 4
wit = membership_truncated(g, ideal_power(jacobian_ideal(f), 2), N)
res = formal_equiv_rank2(f, wit, N)
print("\nf + g ~ ", res.diag_coeffs, "x^2 +", res.residual.poly)
print("pipeline:", " -> ".join(res.steps))
