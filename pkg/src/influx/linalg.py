"""Dense exact linear algebra: matrices over Z_p and fraction-free integer determinants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gf import inverse_mod


class Singular(ArithmeticError):
    """Raised when a matrix over Z_p has no inverse."""

    def __init__(self, rank: int, n: int):
        self.rank = rank
        self.n = n
        super().__init__(f"matrix is singular (rank {rank} < {n})")


class FieldMatrix:
    """Dense ``rows x cols`` matrix over Z_p, stored as a list of row lists."""

    __slots__ = ("p", "rows", "cols", "_a")

    def __init__(self, entries: Sequence[Sequence[int]], p: int, *, cols: int | None = None):
        self.p = p
        self._a = [[int(x) % p for x in row] for row in entries]
        self.rows = len(self._a)
        self.cols = len(self._a[0]) if self._a else (cols or 0)
        if any(len(row) != self.cols for row in self._a):
            raise ValueError("ragged matrix")

    @classmethod
    def _wrap(cls, rows: list[list[int]], p: int, cols: int) -> FieldMatrix:
        obj = cls.__new__(cls)
        obj.p, obj._a, obj.rows, obj.cols = p, rows, len(rows), cols
        return obj

    @classmethod
    def from_ints(cls, entries: Sequence[Sequence[int]], p: int) -> FieldMatrix:
        return cls(entries, p)

    @classmethod
    def identity(cls, n: int, p: int) -> FieldMatrix:
        return cls._wrap([[int(i == j) for j in range(n)] for i in range(n)], p, n)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> FieldMatrix:
        return cls._wrap([[0] * cols for _ in range(rows)], p, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> list[int]:
        """Row-major flat list of entries."""
        return [x for row in self._a for x in row]

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._a[i][j]

    def row(self, i: int) -> list[int]:
        return list(self._a[i])

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self._a]

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self._a]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> FieldMatrix:
        return FieldMatrix._wrap([[self._a[i][j] for j in cols] for i in rows], self.p, len(cols))

    def with_entry(self, i: int, j: int, value: int) -> FieldMatrix:
        rows = [list(r) for r in self._a]
        rows[i][j] = value % self.p
        return FieldMatrix._wrap(rows, self.p, self.cols)

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and self._a == other._a

    def __repr__(self):
        return f"FieldMatrix({self.rows}x{self.cols}, p={self.p})"

    def __matmul__(self, other: FieldMatrix) -> FieldMatrix:
        if self.cols != other.rows or self.p != other.p:
            raise ValueError("incompatible matrices")
        p = self.p
        b = other._a
        out = []
        for row in self._a:
            acc = [0] * other.cols
            for k, x in enumerate(row):
                if x:
                    bk = b[k]
                    for j, y in enumerate(bk):
                        if y:
                            acc[j] += x * y
            out.append([v % p for v in acc])
        return FieldMatrix._wrap(out, p, other.cols)

    def matvec(self, v: Sequence[int]) -> list[int]:
        p = self.p
        return [sum(x * y for x, y in zip(row, v)) % p for row in self._a]

    def lu(self) -> LUDecomposition:
        return LUDecomposition(self)

    def inverse(self) -> FieldMatrix:
        return lu_invert(self)

    def det(self) -> int:
        return det(self)

    def rank(self) -> int:
        return rank(self)


class LUDecomposition:
    """``P A Q = L U`` with full pivoting over Z_p.

    Pivots are searched column by column, leftmost first, and within a
    column top-down; any nonzero entry is an exact pivot.
    """

    def __init__(self, A: FieldMatrix):
        p = A.p
        a = A.tolist()
        nr, nc = A.rows, A.cols
        rowperm = list(range(nr))
        colperm = list(range(nc))
        swaps = 0
        r = 0
        for k in range(min(nr, nc)):
            piv = None
            for c in range(k, nc):
                for i in range(k, nr):
                    if a[i][c]:
                        piv = (i, c)
                        break
                if piv is not None:
                    break
            if piv is None:
                break
            i, c = piv
            if i != k:
                a[i], a[k] = a[k], a[i]
                rowperm[i], rowperm[k] = rowperm[k], rowperm[i]
                swaps += 1
            if c != k:
                for row in a:
                    row[c], row[k] = row[k], row[c]
                colperm[c], colperm[k] = colperm[k], colperm[c]
                swaps += 1
            pivot_row = a[k]
            inv = inverse_mod(pivot_row[k], p)
            nz = [c for c in range(k + 1, nc) if pivot_row[c]]
            for i in range(k + 1, nr):
                row = a[i]
                if row[k]:
                    f = row[k] * inv % p
                    row[k] = f
                    for c in nz:
                        row[c] = (row[c] - f * pivot_row[c]) % p
            r += 1
        self.p = p
        self.shape = (nr, nc)
        self.rank = r
        self.rowperm = rowperm
        self.colperm = colperm
        self._swaps = swaps
        self._a = a

    @property
    def is_singular(self) -> bool:
        nr, nc = self.shape
        return nr != nc or self.rank < nr

    @property
    def det(self) -> int:
        nr, nc = self.shape
        if nr != nc:
            raise ValueError("determinant of a non-square matrix")
        if self.rank < nr:
            return 0
        d = -1 if self._swaps % 2 else 1
        for k in range(nr):
            d = d * self._a[k][k] % self.p
        return d % self.p

    def solve(self, b: Sequence[int]) -> list[int]:
        """Solve ``A x = b``; requires a nonsingular square ``A``."""
        if self.is_singular:
            raise Singular(self.rank, self.shape[0])
        p = self.p
        n = self.shape[0]
        a = self._a
        y = [b[self.rowperm[i]] % p for i in range(n)]
        for i in range(n):
            row = a[i]
            acc = y[i]
            for k in range(i):
                if row[k] and y[k]:
                    acc -= row[k] * y[k]
            y[i] = acc % p
        w = [0] * n
        for i in range(n - 1, -1, -1):
            row = a[i]
            acc = y[i]
            for k in range(i + 1, n):
                if row[k] and w[k]:
                    acc -= row[k] * w[k]
            w[i] = acc * inverse_mod(row[i], p) % p
        x = [0] * n
        for k in range(n):
            x[self.colperm[k]] = w[k]
        return x

    def inverse(self) -> FieldMatrix:
        if self.is_singular:
            raise Singular(self.rank, self.shape[0])
        n = self.shape[0]
        p = self.p
        a = self._a
        inv_diag = [inverse_mod(a[i][i], p) for i in range(n)]
        lower = [[(k, a[i][k]) for k in range(i) if a[i][k]] for i in range(n)]
        upper = [[(k, a[i][k]) for k in range(i + 1, n) if a[i][k]] for i in range(n)]
        where = [0] * n
        for i, orig in enumerate(self.rowperm):
            where[orig] = i
        cols = []
        for e in range(n):
            y = [0] * n
            y[where[e]] = 1
            for i in range(where[e] + 1, n):
                acc = 0
                for k, v in lower[i]:
                    yk = y[k]
                    if yk:
                        acc += v * yk
                if acc:
                    y[i] = -acc % p
            w = [0] * n
            for i in range(n - 1, -1, -1):
                acc = y[i]
                for k, v in upper[i]:
                    wk = w[k]
                    if wk:
                        acc -= v * wk
                if acc:
                    w[i] = acc * inv_diag[i] % p
            col = [0] * n
            for k in range(n):
                col[self.colperm[k]] = w[k]
            cols.append(col)
        return FieldMatrix._wrap([list(r) for r in zip(*cols)], p, n)


def lu_invert(A: FieldMatrix) -> FieldMatrix:
    if A.rows != A.cols:
        raise ValueError("inverse of a non-square matrix")
    return LUDecomposition(A).inverse()


def det(A: FieldMatrix) -> int:
    return LUDecomposition(A).det


def rank(A: FieldMatrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    return LUDecomposition(A).rank


def int_det_bareiss(A: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in A]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def int_rank_bareiss(A: Sequence[Sequence[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    a = [[int(x) for x in row] for row in A]
    nr = len(a)
    nc = len(a[0]) if a else 0
    r = 0
    prev = 1
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        arc = a[r][c]
        for i in range(r + 1, nr):
            aic = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, nc):
                row_i[j] = (row_i[j] * arc - aic * row_r[j]) // prev
            row_i[c] = 0
        prev = arc
        r += 1
        if r == nr:
            break
    return r
