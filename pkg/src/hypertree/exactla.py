"""Exact integer linear algebra: determinant, rank, Smith normal form.

All routines take rectangular integer matrices as sequences of rows and work
with arbitrary-precision Python integers.  Matrices at the scales this
package enumerates are tiny, so simplicity wins over asymptotics.
"""

from __future__ import annotations

from dataclasses import dataclass


def _copy_int_matrix(rows) -> list[list[int]]:
    out = [[int(x) for x in row] for row in rows]
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def det_bareiss(rows) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    a = _copy_int_matrix(rows)
    n = len(a)
    if n == 0:
        return 1
    if len(a[0]) != n:
        raise ValueError(f"matrix is {n}x{len(a[0])}, not square")
    sign = 1
    prev = 1
    for t in range(n - 1):
        pivot_row = next((r for r in range(t, n) if a[r][t] != 0), None)
        if pivot_row is None:
            return 0
        if pivot_row != t:
            a[t], a[pivot_row] = a[pivot_row], a[t]
            sign = -sign
        piv = a[t][t]
        for r in range(t + 1, n):
            row = a[r]
            head = row[t]
            top = a[t]
            for c in range(t + 1, n):
                row[c] = (row[c] * piv - head * top[c]) // prev
            row[t] = 0
        prev = piv
    return sign * a[n - 1][n - 1]


def det_cofactor(rows) -> int:
    """Naive cofactor-expansion determinant; test oracle for tiny matrices."""
    a = _copy_int_matrix(rows)
    n = len(a)
    if n and len(a[0]) != n:
        raise ValueError("not square")

    def rec(rs, cols):
        if not cols:
            return 1
        r0 = rs[0]
        total = 0
        for j, c in enumerate(cols):
            x = a[r0][c]
            if x:
                total += (-1) ** j * x * rec(rs[1:], cols[:j] + cols[j + 1 :])
        return total

    return rec(list(range(n)), list(range(n)))


def int_rank(rows) -> int:
    """Rank over the rationals, computed fraction-free on integers."""
    a = _copy_int_matrix(rows)
    if not a or not a[0]:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    prev = 1
    row = 0
    for col in range(n):
        pivot_row = next((r for r in range(row, m) if a[r][col] != 0), None)
        if pivot_row is None:
            continue
        a[row], a[pivot_row] = a[pivot_row], a[row]
        piv = a[row][col]
        for r in range(row + 1, m):
            head = a[r][col]
            for c in range(col + 1, n):
                a[r][c] = (a[r][c] * piv - head * a[row][c]) // prev
            a[r][col] = 0
        prev = piv
        rank += 1
        row += 1
        if row == m:
            break
    return rank


@dataclass(frozen=True)
class SnfResult:
    """Diagonal of the Smith normal form (positive entries, divisibility chain)."""

    diagonal: tuple[int, ...]
    rank: int

    def group_order(self) -> int:
        """Order of the cokernel torsion = product of the nonzero diagonal."""
        out = 1
        for d in self.diagonal:
            out *= d
        return out

    def prime_exponents(self, p: int) -> tuple[int, ...]:
        """Exponent partition of the p-Sylow part, largest first."""
        exps = []
        for d in self.diagonal:
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if e:
                exps.append(e)
        return tuple(sorted(exps, reverse=True))


def smith_normal_form(rows) -> SnfResult:
    """Smith normal form diagonal of an integer matrix.

    Classic elimination with smallest-magnitude pivots; the divisibility
    chain is enforced directly by folding any non-divisible entry of the
    trailing block into the pivot row before moving on.
    """
    a = _copy_int_matrix(rows)
    if not a or not a[0]:
        return SnfResult((), 0)
    m, n = len(a), len(a[0])
    diag = []
    t = 0
    while t < min(m, n):
        # locate smallest-magnitude nonzero in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = a[t][t]
            # clear the pivot column
            dirty = False
            for r in range(t + 1, m):
                if a[r][t]:
                    q = a[r][t] // piv
                    if q:
                        for c in range(t, n):
                            a[r][c] -= q * a[t][c]
                    if a[r][t]:
                        a[t], a[r] = a[r], a[t]
                        dirty = True
                        break
            if dirty:
                continue
            # clear the pivot row
            for c in range(t + 1, n):
                if a[t][c]:
                    q = a[t][c] // piv
                    if q:
                        for r in range(t, m):
                            a[r][c] -= q * a[r][t]
                    if a[t][c]:
                        for r in range(t, m):
                            a[r][t], a[r][c] = a[r][c], a[r][t]
                        dirty = True
                        break
            if dirty:
                continue
            # force divisibility of the trailing block by the pivot
            culprit = None
            for r in range(t + 1, m):
                for c in range(t + 1, n):
                    if a[r][c] % piv:
                        culprit = r
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            for c in range(t, n):
                a[t][c] += a[culprit][c]
        diag.append(abs(a[t][t]))
        t += 1
    return SnfResult(tuple(diag), len(diag))


def gram_det(rows) -> int:
    """det(B Bᵀ) for an integer matrix B, exactly; 0 if rows are dependent."""
    b = _copy_int_matrix(rows)
    m = len(b)
    gram = [[sum(x * y for x, y in zip(b[i], b[j])) for j in range(m)] for i in range(m)]
    return det_bareiss(gram)
