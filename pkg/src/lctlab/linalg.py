"""Exact linear algebra over the rationals, on sparse dict rows.

Small deterministic kernels shared by the ideal-membership solver, the
Milnor-number colength computation, and quadratic-form diagonalization.
Pivots are chosen by smallest numerator bit length (then smallest column
key) so elimination order, and therefore every result, is reproducible
regardless of dict iteration order.
"""

from __future__ import annotations

from fractions import Fraction


def _bitlen(c) -> int:
    if isinstance(c, Fraction):
        return c.numerator.bit_length() + c.denominator.bit_length()
    return abs(c).bit_length()


class SparseEliminator:
    """Incremental row reduction; rows are dicts mapping column key -> coeff.

    Column keys only need a total order.  ``add_row`` reduces the row against
    the pivots seen so far and, if anything survives, records a new pivot.
    """

    def __init__(self):
        self.pivots = {}  # pivot column -> reduced row (leading coeff 1)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        row = {k: v for k, v in row.items() if v}
        while row:
            hit = None
            for col in row:
                if col in self.pivots:
                    hit = col
                    break
            if hit is None:
                return row
            factor = row[hit]
            for col, coeff in self.pivots[hit].items():
                v = row.get(col, 0) - factor * coeff
                if v:
                    row[col] = v
                else:
                    row.pop(col, None)
        return row

    def add_row(self, row: dict) -> bool:
        """Insert a row; returns True if it increased the rank."""
        red = self.reduce(row)
        if not red:
            return False
        pivot = min(red, key=lambda c: (_bitlen(red[c]), c))
        inv = Fraction(1, 1) / Fraction(red[pivot])
        self.pivots[pivot] = {c: v * inv for c, v in red.items()}
        return True


def solve_dense(rows, rhs):
    """Solve ``rows @ x == rhs`` exactly; rows are lists of coefficients.

    Returns a list of Fractions (free variables set to 0) or None when the
    system is inconsistent.  Partial pivoting picks, within the current
    column, the entry of smallest bit length.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivot_cols = []
    r = 0
    for col in range(n):
        best = None
        for i in range(r, m):
            if a[i][col]:
                if best is None or _bitlen(a[i][col]) < _bitlen(a[best][col]):
                    best = i
        if best is None:
            continue
        a[r], a[best] = a[best], a[r]
        pv = a[r][col]
        a[r] = [v / pv for v in a[r]]
        for i in range(m):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
        pivot_cols.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n]:
            return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivot_cols):
        x[col] = a[i][n]
    return x


def rank_dense(matrix) -> int:
    elim = SparseEliminator()
    for row in matrix:
        elim.add_row({j: Fraction(v) for j, v in enumerate(row) if v})
    return elim.rank


def det_dense(matrix):
    """Exact determinant by fraction-free style elimination on Fractions."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for i in range(col, n):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for i in range(col + 1, n):
            if a[i][col]:
                f = a[i][col] * inv
                a[i] = [u - f * v for u, v in zip(a[i], a[col])]
    return det
