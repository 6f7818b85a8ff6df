"""Dense exact matrices over QQ or GF(p): rank, kernel, solving.

Rank over QQ goes through Bareiss fraction-free elimination on a
denominator-cleared integer copy; reduced echelon paths use plain exact
field elimination.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .field import QQ, Field, PrimeField


class Matrix:
    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, rows: int, cols: int, data=None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if data is None:
            z = field.zero()
            self.data = [[z] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError("matrix data shape mismatch")
            self.data = [[field.of(x) for x in row] for row in data]

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        m = cls(field, n, n)
        one = field.one()
        for i in range(n):
            m.data[i][i] = one
        return m

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols)

    def copy(self) -> "Matrix":
        m = Matrix(self.field, self.rows, self.cols)
        m.data = [row[:] for row in self.data]
        return m

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols}, {self.data})"

    def is_zero(self) -> bool:
        f = self.field
        return all(f.is_zero(x) for row in self.data for x in row)

    def transpose(self) -> "Matrix":
        m = Matrix(self.field, self.cols, self.rows)
        m.data = [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return m

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows or self.field != other.field:
            raise ValueError("matmul shape/field mismatch")
        f = self.field
        out = Matrix(f, self.rows, other.cols)
        for i in range(self.rows):
            arow = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                a = arow[k]
                if f.is_zero(a):
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    b = brow[j]
                    if not f.is_zero(b):
                        orow[j] = f.add(orow[j], f.mul(a, b))
        return out

    def add(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("add shape mismatch")
        f = self.field
        out = Matrix(f, self.rows, self.cols)
        out.data = [
            [f.add(a, b) for a, b in zip(r1, r2)]
            for r1, r2 in zip(self.data, other.data)
        ]
        return out

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.of(c)
        out = Matrix(f, self.rows, self.cols)
        out.data = [[f.mul(c, x) for x in row] for row in self.data]
        return out

    def neg(self) -> "Matrix":
        f = self.field
        out = Matrix(f, self.rows, self.cols)
        out.data = [[f.neg(x) for x in row] for row in self.data]
        return out

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("hstack shape mismatch")
        out = Matrix(self.field, self.rows, self.cols + other.cols)
        out.data = [r1 + r2 for r1, r2 in zip(self.data, other.data)]
        return out

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise ValueError("vstack shape mismatch")
        out = Matrix(self.field, self.rows + other.rows, self.cols)
        out.data = [r[:] for r in self.data] + [r[:] for r in other.data]
        return out

    @classmethod
    def block(cls, blocks) -> "Matrix":
        """Assemble from a 2-D grid of matrices (all entries non-None)."""
        rows = None
        for brow in blocks:
            acc = brow[0]
            for b in brow[1:]:
                acc = acc.hstack(b)
            rows = acc if rows is None else rows.vstack(acc)
        return rows

    @classmethod
    def direct_sum(cls, a: "Matrix", b: "Matrix") -> "Matrix":
        za = Matrix.zero(a.field, a.rows, b.cols)
        zb = Matrix.zero(a.field, b.rows, a.cols)
        return cls.block([[a, za], [zb, b]])

    def kron(self, other: "Matrix") -> "Matrix":
        f = self.field
        out = Matrix(f, self.rows * other.rows, self.cols * other.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i][j]
                if f.is_zero(a):
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        out.data[i * other.rows + k][j * other.cols + l] = f.mul(
                            a, other.data[k][l]
                        )
        return out

    # -- elimination ------------------------------------------------------

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        if self.field is QQ or isinstance(self.field, type(QQ)):
            return _rank_bareiss(self)
        return len(_rref(self)[1])

    def rref(self):
        """Reduced row echelon form; returns (matrix, pivot column list)."""
        return _rref(self)

    def kernel_basis(self) -> "Matrix":
        """Columns form a basis of the right kernel (cols x nullity)."""
        _, pivots, reduced = _rref_full(self)
        pivset = set(pivots)
        free = [j for j in range(self.cols) if j not in pivset]
        f = self.field
        out = Matrix(f, self.cols, len(free))
        one = f.one()
        for idx, j in enumerate(free):
            out.data[j][idx] = one
            for r, pc in enumerate(pivots):
                out.data[pc][idx] = f.neg(reduced.data[r][j])
        return out

    def solve(self, rhs: "Matrix"):
        """One solution X with self @ X = rhs, or None if inconsistent."""
        if rhs.rows != self.rows:
            raise ValueError("solve shape mismatch")
        aug = self.hstack(rhs)
        _, pivots, red = _rref_full(aug)
        for r, pc in enumerate(pivots):
            if pc >= self.cols:
                return None
        f = self.field
        out = Matrix(f, self.cols, rhs.cols)
        for r, pc in enumerate(pivots):
            for j in range(rhs.cols):
                out.data[pc][j] = red.data[r][self.cols + j]
        return out


def _rref(m: Matrix):
    _, pivots, red = _rref_full(m)
    return red, pivots


def _rref_full(m: Matrix):
    f = m.field
    a = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pr = None
        for i in range(r, rows):
            if not f.is_zero(a[i][c]):
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = f.div(f.one(), a[r][c])
        a[r] = [f.mul(inv, x) for x in a[r]]
        for i in range(rows):
            if i != r and not f.is_zero(a[i][c]):
                coef = a[i][c]
                a[i] = [f.sub(x, f.mul(coef, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    red = Matrix(f, rows, cols)
    red.data = a
    return m, pivots, red


def _rank_bareiss(m: Matrix) -> int:
    # clear denominators rowwise, then fraction-free elimination over Z
    a = []
    for row in m.data:
        den = lcm(*(x.denominator for x in row)) if row else 1
        a.append([int(x * den) for x in row])
    rows, cols = m.rows, m.cols
    rank = 0
    prev = 1
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        rank += 1
        r += 1
        if r >= rows:
            break
    return rank


def rank(m: Matrix) -> int:
    return m.rank()


def matrix_from_ints(field: Field, data) -> Matrix:
    rows = len(data)
    cols = len(data[0]) if rows else 0
    return Matrix(field, rows, cols, data)
