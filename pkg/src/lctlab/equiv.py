"""Formal equivalence of series singularities at finite truncation order.

Two constructions, both returning explicit coordinate changes that are
verified by direct substitution:

* :func:`morsify` splits off the nondegenerate quadratic part of a
  multiplicity-2 germ: a rational linear change diagonalizes the quadratic
  form, then each diagonal variable is cleaned by completing the square
  until the germ is ``sum(a_i x_i^2) + h(rest)`` with ``mult(h) >= 3``.

* :func:`tougeron` absorbs a perturbation g lying in the square of the
  Jacobian ideal into f (for ``mult(f) >= 3``) by a Newton-style sequence of
  near-identity substitutions; the defect is squared at every step, so
  O(log N) steps reach any truncation order N.

Everything is certified modulo ``m^N`` only; that is the computable content
of the corresponding formal statements, whose limits converge m-adically.

Implementation note on ``tougeron``: each step needs the current residual
written as a combination of products of partials of the *current* germ.
Instead of solving a linear system per step, the witness matrix is
transported through the substitution with an exactly computed transition
matrix (a Neumann-series inverse), which keeps the whole iteration inside
truncated polynomial arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .jacobian import (
    MembershipWitness,
    NotMember,
    ideal_power,
    jacobian_ideal,
    membership_truncated,
    quadratic_form_matrix,
)
from .linalg import det_dense
from .polyring import (
    Polynomial,
    TruncatedSeries,
    divided_power,
    partial_derivative,
    series_inverse,
    series_sqrt,
    substitute,
    substitute_shifted,
)


class RankDropError(ValueError):
    """The quadratic rank of f+g dropped below that of f.

    The rank-preserving hypothesis fails for special perturbations; this is
    a reported condition, not a bug.
    """

    def __init__(self, rank_f: int, rank_fg: int):
        super().__init__(
            f"rank of the perturbed quadratic part dropped: {rank_fg} < {rank_f}"
        )
        self.rank_f = rank_f
        self.rank_fg = rank_fg


def _as_series(f, order):
    if isinstance(f, TruncatedSeries):
        return f.truncate(order)
    return TruncatedSeries(f, order)


class CoordinateMap:
    """A substitution x_i -> image_i defining a local automorphism mod m^N.

    Images have zero constant term and the linear parts form an invertible
    matrix (unit Jacobian determinant at the origin), which is exactly the
    automorphism criterion for formal coordinate changes.
    """

    __slots__ = ("nvars", "images", "order")

    def __init__(self, images, order: int, _skip_check: bool = False):
        images = tuple(_as_series(im, order) for im in images)
        nvars = images[0].nvars
        for im in images:
            if im.nvars != nvars:
                raise ValueError("image nvars mismatch")
            if im.constant_term:
                raise ValueError("map images must have zero constant term")
        self.nvars = nvars
        self.images = images
        self.order = order
        if not _skip_check and not self.jacobian_at_zero():
            raise ValueError("map is not an automorphism: Jacobian vanishes at 0")

    # construction helpers -------------------------------------------------

    @classmethod
    def identity(cls, nvars: int, order: int) -> "CoordinateMap":
        return cls(
            [Polynomial.variable(nvars, i) for i in range(1, nvars + 1)], order
        )

    @classmethod
    def shift(cls, shifts, order: int) -> "CoordinateMap":
        """The map x_i -> x_i + g_i for shifts of multiplicity >= 2."""
        images = []
        for i, g in enumerate(shifts, start=1):
            gp = g.poly if isinstance(g, TruncatedSeries) else g
            images.append(Polynomial.variable(gp.nvars, i) + gp)
        return cls(images, order)

    @classmethod
    def linear(cls, matrix, order: int) -> "CoordinateMap":
        """x_i -> sum_j matrix[i][j] * x_j (matrix must be invertible)."""
        n = len(matrix)
        images = []
        for i in range(n):
            img = Polynomial.zero(n)
            for j in range(n):
                if matrix[i][j]:
                    img = img + Polynomial.variable(n, j + 1) * matrix[i][j]
            images.append(img)
        return cls(images, order)

    # queries ---------------------------------------------------------------

    def linear_part(self):
        out = [[Fraction(0)] * self.nvars for _ in range(self.nvars)]
        for i, im in enumerate(self.images):
            for mono, coeff in im.poly.graded_part(1).terms.items():
                j = mono.index(1)
                out[i][j] = Fraction(coeff)
        return out

    def jacobian_at_zero(self):
        return det_dense(self.linear_part())

    def apply(self, f, order=None) -> TruncatedSeries:
        n = self.order if order is None else min(order, self.order)
        return substitute(f, self.images, n)

    def then(self, other: "CoordinateMap") -> "CoordinateMap":
        """The map realizing: substitute along self, then along other.

        ``self.then(other).apply(f) == other-substitution of self.apply(f)``.
        Near-identity second factors (all shifts of multiplicity >= 2) take
        the cheap Taylor route.
        """
        order = min(self.order, other.order)
        n = self.nvars
        shifts = [
            other.images[i].poly - Polynomial.variable(n, i + 1) for i in range(n)
        ]
        if all(s.is_zero() or s.multiplicity() >= 2 for s in shifts):
            images = [substitute_shifted(im.poly, shifts, order) for im in self.images]
        else:
            images = [substitute(im.poly, other.images, order) for im in self.images]
        return CoordinateMap(images, order, _skip_check=True)

    def invert(self) -> "CoordinateMap":
        """Compositional inverse mod m^order, by fixed-point refinement."""
        n, order = self.nvars, self.order
        lin = self.linear_part()
        # inverse of the linear part, solving L^T columns exactly
        from .linalg import solve_dense

        inv = []
        for i in range(n):
            rhs = [Fraction(1) if k == i else Fraction(0) for k in range(n)]
            col = solve_dense([list(r) for r in lin], rhs)
            inv.append(col)
        # linv[i][j]: coefficient of x_j in the i-th inverse image
        linv = [[inv[j][i] for j in range(n)] for i in range(n)]

        def linear_apply(vecs):
            out = []
            for i in range(n):
                acc = Polynomial.zero(n)
                for j in range(n):
                    if linv[i][j]:
                        acc = acc + vecs[j] * linv[i][j]
                out.append(acc)
            return out

        xs = [Polynomial.variable(n, i) for i in range(1, n + 1)]
        higher = [im.poly - im.poly.graded_part(1) for im in self.images]
        sigma = linear_apply(xs)
        for _ in range(order + 1):
            correction = [
                substitute(h, sigma, order).poly if not h.is_zero() else h
                for h in higher
            ]
            new_sigma = linear_apply([x - c for x, c in zip(xs, correction)])
            if new_sigma == sigma:
                break
            sigma = new_sigma
        result = CoordinateMap(sigma, order, _skip_check=True)
        check = self.then(result)
        for i, im in enumerate(check.images, start=1):
            if im.poly != Polynomial.variable(n, i):
                raise AssertionError("map inversion failed to verify")
        return result

    def __repr__(self):
        ims = ", ".join(str(im.poly) for im in self.images)
        return f"CoordinateMap([{ims}], order={self.order})"


def verify_map(f, target, cmap: CoordinateMap, order=None):
    """Exact check that substituting along cmap sends f to target mod m^N.

    Returns ``(True, None)`` or ``(False, first_differing_degree)``.
    """
    n = cmap.order if order is None else order
    image = cmap.apply(f, n)
    tgt = _as_series(target, n)
    diff = image.poly - tgt.poly
    if diff.is_zero():
        return True, None
    return False, diff.multiplicity()


# ----------------------------------------------------------------------
# the Jacobian-square absorption iteration


def _matrix_zero(n, nvars):
    return [[Polynomial.zero(nvars) for _ in range(n)] for _ in range(n)]


def _neumann_inverse(E, order):
    """(I + E)^-1 mod m^order for a matrix of series with mult(E) >= 1."""
    n = len(E)
    nvars = E[0][0].nvars
    ident = [
        [Polynomial.constant(nvars, 1) if i == j else Polynomial.zero(nvars) for j in range(n)]
        for i in range(n)
    ]
    x = [row[:] for row in ident]
    for _ in range(order + 1):
        nxt = [row[:] for row in ident]
        for i in range(n):
            for j in range(n):
                acc = nxt[i][j]
                for k in range(n):
                    if not E[i][k].is_zero() and not x[k][j].is_zero():
                        acc = acc - E[i][k].mul_truncated(x[k][j], order)
                nxt[i][j] = acc
        if nxt == x:
            break
        x = nxt
    return x


def _enumerate_alpha(g_mults, budget):
    """All nonzero exponent vectors alpha with sum(alpha_i * g_mults_i) < budget."""
    n = len(g_mults)
    out = []

    def rec(i, alpha, cost):
        if i == n:
            if any(alpha):
                out.append(tuple(alpha))
            return
        e = 0
        while cost + e * g_mults[i] < budget:
            alpha[i] = e
            rec(i + 1, alpha, cost + e * g_mults[i])
            e += 1
        alpha[i] = 0

    rec(0, [0] * n, 0)
    return out


class _GPowers:
    """Memoized truncated products g^alpha used by the witness transport."""

    def __init__(self, gs, order):
        self.gs = gs
        self.order = order
        nvars = gs[0].nvars
        self.cache = {(0,) * len(gs): Polynomial.constant(nvars, 1)}

    def get(self, alpha):
        cached = self.cache.get(alpha)
        if cached is not None:
            return cached
        i = next(k for k, a in enumerate(alpha) if a)
        prev = list(alpha)
        prev[i] -= 1
        base = self.get(tuple(prev))
        val = base.mul_truncated(self.gs[i], self.order)
        self.cache[alpha] = val
        return val


def _tougeron_core(f_poly: Polynomial, H, order: int, check: bool = True):
    """Absorb ``sum(H[i][l] * df_i * df_l)`` into f by iterated substitutions.

    Returns the composed CoordinateMap.  ``H`` is an n x n matrix of
    polynomial witness coefficients; the target is ``f + g`` with
    ``g = sum_{i,l} H[i][l] * partial_i(f) * partial_l(f)``.
    """
    n = f_poly.nvars
    d = f_poly.multiplicity()
    if d < 3 or f_poly.constant_term:
        raise ValueError("absorption needs multiplicity >= 3 at the origin")
    partials0 = [partial_derivative(f_poly, i) for i in range(1, n + 1)]
    g = Polynomial.zero(n)
    for i in range(n):
        for l in range(n):
            if not H[i][l].is_zero():
                g = g + H[i][l] * partials0[i] * partials0[l]
    target = TruncatedSeries(f_poly + g, order)

    psi = CoordinateMap.identity(n, order)
    if g.truncate(order).is_zero():
        return psi

    jmult = min(p.multiplicity() for p in partials0 if not p.is_zero())
    wit_order = max(order - 2 * jmult, 1)
    H = [[H[i][l].truncate(wit_order) for l in range(n)] for i in range(n)]
    F = TruncatedSeries(f_poly, order)
    a_floor = 0
    cap = math.ceil(math.log2(order + 1)) + 1  # step bound for defect squaring
    prev_res_mult = None

    for _step in range(cap):
        residual = target - F
        if residual.is_zero():
            break
        res_mult = residual.multiplicity()
        if prev_res_mult is not None:
            if not res_mult > prev_res_mult:
                raise AssertionError("residual multiplicity failed to increase")
            if res_mult < min(a_floor + 2 * jmult, order):
                raise AssertionError("residual multiplicity below the step bound")
        prev_res_mult = res_mult

        partials = [partial_derivative(F.poly, i) for i in range(1, n + 1)]
        if check:
            recon = Polynomial.zero(n)
            for i in range(n):
                for l in range(n):
                    if not H[i][l].is_zero():
                        t = H[i][l].mul_truncated(partials[i], order)
                        recon = recon + t.mul_truncated(partials[l], order)
            if recon.truncate(order) != residual.poly:
                raise AssertionError("witness lost track of the residual")

        gs = []
        for i in range(n):
            gi = Polynomial.zero(n)
            for l in range(n):
                if not H[i][l].is_zero():
                    gi = gi + H[i][l].mul_truncated(partials[l], order - jmult + 1)
            gs.append(gi)
        for gi in gs:
            if not gi.is_zero() and gi.multiplicity() < a_floor + jmult:
                raise AssertionError("shift multiplicity below the step bound")

        phi = CoordinateMap.shift(gs, order)
        F_new = substitute_shifted(F.poly, gs, order)
        psi = psi.then(phi)
        new_target_gap = target - F_new
        if new_target_gap.is_zero():
            F = F_new
            break

        # transport the witness to the partials of the new germ
        live_mults = [gi.multiplicity() for gi in gs if not gi.is_zero()]
        if not live_mults:
            raise AssertionError("nonzero residual with identically zero shifts")
        top = max(live_mults)
        blocked = wit_order + 2 * top + 1  # cost that excludes a coordinate
        g_mults = [
            gi.multiplicity() if not gi.is_zero() else blocked for gi in gs
        ]
        gpow = _GPowers([gi.truncate(wit_order) for gi in gs], wit_order)

        # W[(i1,i2)] collects D^alpha F * g^(alpha - e_i1 - e_i2) over alpha
        # whose two smallest indices are (i1, i2); then the new residual is
        # -sum W * g_i1 * g_i2.
        W = {}
        for alpha in _enumerate_alpha(g_mults, wit_order + 2 * top):
            if sum(alpha) < 2:
                continue
            support = [i for i, a in enumerate(alpha) for _ in range(min(a, 2))]
            i1, i2 = support[0], support[1]
            rest = list(alpha)
            rest[i1] -= 1
            rest[i2] -= 1
            rest = tuple(rest)
            if sum(r * m for r, m in zip(rest, g_mults)) >= wit_order:
                continue
            dpf = divided_power(F.poly, alpha)
            if dpf.is_zero():
                continue
            term = dpf.truncate(wit_order).mul_truncated(gpow.get(rest), wit_order)
            if term.is_zero():
                continue
            key = (i1, i2)
            W[key] = W.get(key, Polynomial.zero(n)) + term

        H_mid = _matrix_zero(n, n)
        for (i1, i2), w in W.items():
            if w.is_zero():
                continue
            for k in range(n):
                if H[i1][k].is_zero():
                    continue
                wk = w.mul_truncated(H[i1][k], wit_order)
                for l in range(n):
                    if H[i2][l].is_zero():
                        continue
                    H_mid[k][l] = H_mid[k][l] - wk.mul_truncated(H[i2][l], wit_order)

        # transition: grad(F) = B * grad(F_new) with
        # B = inverse of (I + A)(I + M), A[i][j] = d_i g_j,
        # M[u][v] = sum_w V[u][w] H[w][v],
        # V[u][w] = sum over alpha with first index w of D^alpha(d_u F) g^(alpha-e_w)
        A = [[partial_derivative(gs[j], i + 1).truncate(wit_order) for j in range(n)] for i in range(n)]
        V = [[Polynomial.zero(n) for _ in range(n)] for _ in range(n)]
        for alpha in _enumerate_alpha(g_mults, wit_order + top):
            w_idx = next(i for i, a in enumerate(alpha) if a)
            rest = list(alpha)
            rest[w_idx] -= 1
            rest = tuple(rest)
            if sum(r * m for r, m in zip(rest, g_mults)) >= wit_order:
                continue
            grest = gpow.get(rest)
            if grest.is_zero():
                continue
            for u in range(n):
                dpu = divided_power(partials[u], alpha)
                if dpu.is_zero():
                    continue
                V[u][w_idx] = V[u][w_idx] + dpu.truncate(wit_order).mul_truncated(
                    grest, wit_order
                )
        M = _matrix_zero(n, f_poly.nvars)
        for u in range(n):
            for v in range(n):
                acc = M[u][v]
                for w_idx in range(n):
                    if not V[u][w_idx].is_zero() and not H[w_idx][v].is_zero():
                        acc = acc + V[u][w_idx].mul_truncated(H[w_idx][v], wit_order)
                M[u][v] = acc
        # E := A + M + A*M, so (I+A)(I+M) = I + E
        E = [[A[i][j] + M[i][j] for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                acc = E[i][j]
                for k in range(n):
                    if not A[i][k].is_zero() and not M[k][j].is_zero():
                        acc = acc + A[i][k].mul_truncated(M[k][j], wit_order)
                E[i][j] = acc
        B = _neumann_inverse(E, wit_order)

        H_new = _matrix_zero(n, f_poly.nvars)
        for k in range(n):
            for l in range(n):
                if H_mid[k][l].is_zero():
                    continue
                for u in range(n):
                    if B[k][u].is_zero():
                        continue
                    bku = H_mid[k][l].mul_truncated(B[k][u], wit_order)
                    for v in range(n):
                        if B[l][v].is_zero():
                            continue
                        H_new[u][v] = H_new[u][v] + bku.mul_truncated(
                            B[l][v], wit_order
                        )
        H = H_new
        F = F_new
        a_floor = 2 * a_floor + 1
    else:
        raise AssertionError("absorption did not converge within the step cap")

    residual = target - psi.apply(f_poly, order)
    if not residual.is_zero():
        raise AssertionError("absorption map failed final verification")
    if not psi.jacobian_at_zero():
        raise AssertionError("absorption map lost the automorphism property")
    return psi


def tougeron(f: Polynomial, g_witness: MembershipWitness, order: int, check: bool = True) -> CoordinateMap:
    """Coordinate change sending f to f + g mod m^order, for g in J_f^2.

    ``g_witness`` must certify membership of g in the square of the Jacobian
    ideal (generators ordered as produced by ``ideal_power(jacobian_ideal(f),
    2)``) at order >= the requested one.  The returned map is verified by
    substitution before being returned.
    """
    if f.multiplicity() < 3:
        raise ValueError("tougeron needs mult(f) >= 3; use formal_equiv_rank2 for rank cases")
    if g_witness.order < order:
        raise ValueError(
            f"witness order {g_witness.order} is smaller than the requested order {order}"
        )
    n = f.nvars
    jf2 = ideal_power(jacobian_ideal(f), 2)
    if [g.terms for g in g_witness.gens.gens] != [g.terms for g in jf2.gens]:
        raise ValueError("witness generators are not the Jacobian-square generators of f")
    if not g_witness.verify():
        raise ValueError("witness does not re-expand to its target")
    H = _matrix_zero(n, n)
    idx = 0
    for i in range(n):
        for j in range(i, n):
            H[i][j] = H[i][j] + g_witness.coefficients[idx].poly
            idx += 1
    return _tougeron_core(f, H, order, check=check)


# ----------------------------------------------------------------------
# morsification


@dataclass
class MorsifyResult:
    """Outcome of splitting off the quadratic part.

    ``map`` sends f to ``sum(diag_coeffs[i] * x_{i+1}^2) + residual`` modulo
    m^order, with the residual supported on the variables past the rank.
    """

    map: CoordinateMap
    diag_coeffs: list
    residual: TruncatedSeries
    order: int

    def normal_form(self) -> TruncatedSeries:
        n = self.residual.nvars
        total = Polynomial.zero(n)
        for i, a in enumerate(self.diag_coeffs, start=1):
            total = total + Polynomial.variable(n, i) ** 2 * a
        return TruncatedSeries(total + self.residual.poly, self.order)


def _diagonalize_quadratic(S):
    """Congruence transform: returns (P, diag) with P^T S P diagonal and the
    nonzero diagonal entries first; P is exactly invertible."""
    n = len(S)
    S = [[Fraction(v) for v in row] for row in S]
    P = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]

    def col_axpy(dst, src, factor):
        # column_dst += factor * column_src, congruently on S, plainly on P
        for i in range(n):
            P[i][dst] += factor * P[i][src]
        for i in range(n):
            S[i][dst] += factor * S[i][src]
        for j in range(n):
            S[dst][j] += factor * S[src][j]

    def col_swap(a, b):
        for i in range(n):
            P[i][a], P[i][b] = P[i][b], P[i][a]
        for i in range(n):
            S[i][a], S[i][b] = S[i][b], S[i][a]
        for j in range(n):
            S[a][j], S[b][j] = S[b][j], S[a][j]

    for k in range(n):
        if not S[k][k]:
            # prefer a later variable with nonzero diagonal (largest value,
            # then lowest index), else create one from an off-diagonal entry
            best = None
            for i in range(k + 1, n):
                if S[i][i] and (best is None or abs(S[i][i]) > abs(S[best][best])):
                    best = i
            if best is not None:
                col_swap(k, best)
            else:
                hit = None
                for i in range(k, n):
                    for j in range(i + 1, n):
                        if S[i][j]:
                            hit = (i, j)
                            break
                    if hit:
                        break
                if hit is None:
                    break  # remaining block is zero: rank reached
                i, j = hit
                if i != k:
                    col_swap(k, i)
                    j = k if j == k else j
                col_axpy(k, j, Fraction(1))
        piv = S[k][k]
        for j in range(k + 1, n):
            if S[k][j]:
                col_axpy(j, k, -S[k][j] / piv)
    diag = [S[i][i] for i in range(n)]
    # move zero diagonal entries to the back, preserving relative order
    perm = [i for i in range(n) if diag[i]] + [i for i in range(n) if not diag[i]]
    P = [[P[i][perm[j]] for j in range(n)] for i in range(n)]
    from .polyring import _norm_coeff

    diag = [_norm_coeff(diag[p]) for p in perm if diag[p]]
    return P, diag


def _split_by_variable(poly: Polynomial, k: int):
    """Write poly = x_k^2 * a + x_k * b + h by the exponent of x_k (1-indexed)."""
    n = poly.nvars
    i = k - 1
    a, b, h = {}, {}, {}
    for mono, coeff in poly.terms.items():
        e = mono[i]
        if e >= 2:
            m = list(mono)
            m[i] = e - 2
            key = tuple(m)
            a[key] = a.get(key, 0) + coeff
        elif e == 1:
            m = list(mono)
            m[i] = 0
            b[tuple(m)] = coeff
        else:
            h[mono] = coeff
    return Polynomial(n, a), Polynomial(n, b), Polynomial(n, h)


def _morsify_variable(F: TruncatedSeries, k: int, order: int):
    """Clean variable k of a germ whose processed part is already diagonal.

    Returns (composed map, new F, diagonal coefficient a_k).  The b-part is
    absorbed by completing the square (its multiplicity strictly increases
    each pass, so the loop terminates) and the x_k-dependence of the leading
    coefficient is removed by a unit rescaling of x_k.
    """
    n = F.nvars
    quad = F.poly.graded_part(2)
    cmap = CoordinateMap.identity(n, order)
    a, b, _h = _split_by_variable(F.poly, k)
    a_k = a.constant_term
    if not a_k:
        raise ValueError(f"no x{k}^2 term; diagonalize the quadratic part first")
    guard = 0
    while not b.truncate(order - 1).is_zero():
        prev_mult = b.multiplicity()
        shifts = [Polynomial.zero(n) for _ in range(n)]
        shifts[k - 1] = b * (Fraction(-1, 2) / Fraction(a_k))
        step = CoordinateMap.shift(shifts, order)
        F = substitute_shifted(F.poly, shifts, order)
        cmap = cmap.then(step)
        if F.poly.graded_part(2) != quad:
            raise AssertionError("completing the square disturbed the quadratic part")
        a, b, _h = _split_by_variable(F.poly, k)
        if not b.truncate(order - 1).is_zero() and not b.multiplicity() > prev_mult:
            raise AssertionError("b-part multiplicity failed to increase")
        guard += 1
        if guard > order + 2:
            raise AssertionError("completing the square did not terminate")
    # rescale x_k so the x_k^2 block has the constant coefficient a_k:
    # solve q = 1 / sqrt(a(x with x_k -> x_k q) / a_k) by fixed point
    if a.truncate(max(order - 2, 1)) != Polynomial.constant(n, a_k):
        sub_order = max(order - 2, 1)
        xs = [Polynomial.variable(n, i) for i in range(1, n + 1)]
        q = Polynomial.constant(n, 1)
        for _ in range(order + 1):
            images = list(xs)
            images[k - 1] = xs[k - 1].mul_truncated(q, sub_order)
            a_sub = substitute(a, images, sub_order).poly
            u = TruncatedSeries(a_sub * (Fraction(1) / Fraction(a_k)), sub_order)
            q_new = series_inverse(series_sqrt(u)).poly
            if q_new == q:
                break
            q = q_new
        shifts = [Polynomial.zero(n)] * n
        shifts[k - 1] = Polynomial.variable(n, k).mul_truncated(
            q - Polynomial.constant(n, 1), order
        )
        step = CoordinateMap.shift(shifts, order)
        F = substitute_shifted(F.poly, shifts, order)
        cmap = cmap.then(step)
        a, b, _h = _split_by_variable(F.poly, k)
        if a != Polynomial.constant(n, a_k) or not b.truncate(order - 1).is_zero():
            raise AssertionError("unit rescaling failed to normalize the block")
    return cmap, F, a_k


def morsify(f, order: int) -> MorsifyResult:
    """Split a multiplicity-2 germ as diagonal quadratic part plus residual.

    The coordinate change is assembled from an exact congruence
    diagonalization of the quadratic form followed by completing the square
    in each diagonal variable; the quadratic part is preserved at every
    elementary step and the result satisfies
    ``substitute(f, map) == sum(a_i x_i^2) + residual mod m^order`` with the
    residual of multiplicity >= 3 in the variables past the rank.
    """
    fs = _as_series(f, order)
    fp = fs.poly
    if fp.constant_term:
        raise ValueError("morsify needs f(0) = 0")
    if fp.multiplicity() != 2:
        raise ValueError("morsify needs multiplicity exactly 2")
    n = fp.nvars
    P, diag = _diagonalize_quadratic(quadratic_form_matrix(fp))
    r = len(diag)
    cmap = CoordinateMap.linear(P, order)
    F = cmap.apply(fp, order)
    for k in range(1, r + 1):
        step_map, F, a_k = _morsify_variable(F, k, order)
        if a_k != diag[k - 1]:
            raise AssertionError("diagonal coefficient drifted during cleaning")
        cmap = cmap.then(step_map)
    residual = F.poly
    for i, a_k in enumerate(diag, start=1):
        residual = residual - Polynomial.variable(n, i) ** 2 * a_k
    res = TruncatedSeries(residual, order)
    if not res.is_zero():
        if res.poly.multiplicity() < 3:
            raise AssertionError("residual multiplicity below 3")
        if any(v <= r for v in res.poly.variables_used()):
            raise AssertionError("residual touches a diagonalized variable")
    ok, first_bad = verify_map(fp, MorsifyResult(cmap, diag, res, order).normal_form(), cmap, order)
    if not ok:
        raise AssertionError(f"morsify failed to verify at degree {first_bad}")
    return MorsifyResult(cmap, diag, res, order)


# ----------------------------------------------------------------------
# rank-preserving absorption for multiplicity 2


@dataclass
class Rank2Result:
    """Coordinate change sending f+g to ``sum(c_i x_i^2) + h`` mod m^order."""

    map: CoordinateMap
    diag_coeffs: list
    residual: TruncatedSeries
    rank: int
    order: int
    steps: list

    def normal_form(self) -> TruncatedSeries:
        n = self.residual.nvars
        total = Polynomial.zero(n)
        for i, c in enumerate(self.diag_coeffs, start=1):
            total = total + Polynomial.variable(n, i) ** 2 * c
        return TruncatedSeries(total + self.residual.poly, self.order)


def _restrict_vars(poly: Polynomial, keep):
    """Project a polynomial supported on `keep` (1-indexed) to that subring."""
    idx = [v - 1 for v in keep]
    out = {}
    for mono, coeff in poly.terms.items():
        for i, e in enumerate(mono):
            if e and (i + 1) not in keep:
                raise ValueError("polynomial not supported on the kept variables")
        out[tuple(mono[i] for i in idx)] = coeff
    return Polynomial(len(keep), out)


def _extend_vars(poly: Polynomial, nvars: int, positions):
    """Inverse of _restrict_vars: re-embed into nvars variables."""
    out = {}
    for mono, coeff in poly.terms.items():
        full = [0] * nvars
        for e, pos in zip(mono, positions):
            full[pos - 1] = e
        out[tuple(full)] = coeff
    return Polynomial(nvars, out)


def split_form(f: Polynomial):
    """Recognize ``f = sum(a_i x_i^2) + h(x_{r+1}..x_n)`` and return (r, diag, h).

    Raises if f is not in split normal form (run morsify first).
    """
    n = f.nvars
    quad = f.graded_part(2)
    diag = {}
    for mono, coeff in quad.terms.items():
        if sorted(mono, reverse=True)[0] != 2 or sum(mono) != 2 or mono.count(2) != 1:
            raise ValueError("quadratic part is not diagonal; morsify first")
        diag[mono.index(2) + 1] = coeff
    r = len(diag)
    if sorted(diag) != list(range(1, r + 1)):
        raise ValueError("diagonal variables must be the leading ones; reorder first")
    h = f - quad
    if not h.is_zero():
        if h.multiplicity() < 3:
            raise ValueError("higher part must have multiplicity >= 3")
        if any(v <= r for v in h.variables_used()):
            raise ValueError("higher part must avoid the diagonal variables")
    return r, [diag[i] for i in range(1, r + 1)], h


def formal_equiv_rank2(
    f: Polynomial, g_witness: MembershipWitness, order: int, check: bool = True
) -> Rank2Result:
    """Absorb g in J_f^2 into a split multiplicity-2 germ, preserving rank.

    Pipeline: diagonalize the perturbed quadratic part by an exact linear
    change, morsify the diagonal variables one at a time, then absorb the
    leftover perturbation of the residual germ (it lands in the square of
    the residual's own Jacobian ideal) with the multiplicity-3 iteration.
    Raises :class:`RankDropError` when rank((f+g)_2) < rank(f_2): that is the
    hypothesis of the statement, reported rather than repaired.
    """
    n = f.nvars
    r, diag, h = split_form(f)
    jf2 = ideal_power(jacobian_ideal(f), 2)
    if [g.terms for g in g_witness.gens.gens] != [g.terms for g in jf2.gens]:
        raise ValueError("witness generators are not the Jacobian-square generators of f")
    if not g_witness.verify():
        raise ValueError("witness does not re-expand to its target")
    g = g_witness.target
    fg = f + g
    S = quadratic_form_matrix(fg)
    for row in S:
        if any(row[r:]):
            raise AssertionError("perturbed quadratic part leaks past the rank block")
    P, c = _diagonalize_quadratic(S)
    if len(c) != r:
        raise RankDropError(r, len(c))

    steps = []
    cmap = CoordinateMap.linear(P, order)
    F = cmap.apply(fg, order)
    steps.append("linear diagonalization of the perturbed quadratic part")
    for k in range(1, r + 1):
        step_map, F, c_k = _morsify_variable(F, k, order)
        if c_k != c[k - 1]:
            raise AssertionError("diagonal coefficient drifted during cleaning")
        cmap = cmap.then(step_map)
        steps.append(f"morsification with respect to x{k}")

    # residual after the quadratic block: h plus a perturbation q in the
    # square of the Jacobian ideal of h
    rest_vars = list(range(r + 1, n + 1))
    resid = F.poly
    for i, c_k in enumerate(c, start=1):
        resid = resid - Polynomial.variable(n, i) ** 2 * c_k
    q = (resid - h).truncate(order)
    if not q.is_zero():
        if not rest_vars:
            raise AssertionError("full-rank germ left a nonzero residual")
        h_sub = _restrict_vars(h, rest_vars)
        hq_sub = _restrict_vars(resid, rest_vars)
        mq_sub = _restrict_vars(-q, rest_vars)
        jhq2 = ideal_power(jacobian_ideal(hq_sub), 2)
        wit = membership_truncated(mq_sub, jhq2, order)
        if isinstance(wit, NotMember):
            raise AssertionError(
                "residual perturbation unexpectedly not in the Jacobian square"
            )
        m = len(rest_vars)
        Hm = _matrix_zero(m, m)
        idx = 0
        for i in range(m):
            for j in range(i, m):
                Hm[i][j] = Hm[i][j] + wit.coefficients[idx].poly
                idx += 1
        theta = _tougeron_core(hq_sub, Hm, order, check=check)
        images = [Polynomial.variable(n, i) for i in range(1, n + 1)]
        for pos, im in zip(rest_vars, theta.images):
            images[pos - 1] = _extend_vars(im.poly, n, rest_vars)
        theta_ext = CoordinateMap(images, order)
        cmap = cmap.then(theta_ext)
        steps.append("absorption of the residual perturbation")

    result = Rank2Result(
        map=cmap,
        diag_coeffs=c,
        residual=TruncatedSeries(h, order),
        rank=r,
        order=order,
        steps=steps,
    )
    ok, first_bad = verify_map(fg, result.normal_form(), cmap, order)
    if not ok:
        raise AssertionError(f"rank-2 absorption failed to verify at degree {first_bad}")
    return result
