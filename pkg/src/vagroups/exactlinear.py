"""Exact integer and rational-mod-1 linear algebra.

Everything in this module is exact: integer matrices hold arbitrary-precision
Python ints, angle vectors hold ``Fraction`` values reduced into [0, 1).
No floating point is used anywhere; equality of characters and stabilizer
membership reduce to coordinate-wise rational equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence


class IntMatrix:
    """Immutable dense integer matrix, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        if rows:
            width = len(rows[0])
            if any(len(row) != width for row in rows):
                raise ValueError("ragged rows")
        else:
            width = 0
        object.__setattr__(self, "data", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)])

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.data == other.data

    def __hash__(self) -> int:
        return hash(self.data)

    def __repr__(self) -> str:
        return f"IntMatrix({list(map(list, self.data))!r})"

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in row] for row in self.data])

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_shape(other)
        return IntMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_shape(other)
        return IntMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        )

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        cols = tuple(zip(*other.data)) if other.data else ()
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.data]
        )

    def _check_shape(self, other: "IntMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self.data)) if self.data else IntMatrix([])

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product over the integers."""
        if len(vec) != self.cols:
            raise ValueError(f"dimension mismatch: {self.rows}x{self.cols} applied to length {len(vec)}")
        return tuple(sum(a * v for a, v in zip(row, vec)) for row in self.data)

    def apply_frac(self, vec: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise ValueError(f"dimension mismatch: {self.rows}x{self.cols} applied to length {len(vec)}")
        return tuple(sum((Fraction(a) * v for a, v in zip(row, vec)), Fraction(0)) for row in self.data)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(row) for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and self.det() in (1, -1)


@dataclass(frozen=True)
class SNFDecomposition:
    """Smith decomposition U*M*V = S with U, V unimodular and S diagonal.

    ``v_inv`` is the exact integer inverse of V, tracked during reduction;
    it is what turns presentation coordinates into invariant-factor
    coordinates and back.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    v_inv: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S.data[i][i] for i in range(min(self.S.rows, self.S.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nontrivial invariant factors (diagonal entries > 1)."""
        return tuple(d for d in self.diagonal if d > 1)


def smith_normal_form(matrix: IntMatrix) -> SNFDecomposition:
    """Smith normal form over Z with both unimodular transforms.

    Pivoting picks the smallest nonzero absolute value in the remaining
    submatrix and swaps it into place; rows and columns are then cleared by
    division with remainder. After a pivot is isolated, divisibility of the
    remaining submatrix by the pivot is enforced by folding an offending row
    into the pivot row, which keeps the diagonal a divisibility chain.
    """
    m, n = matrix.rows, matrix.cols
    s = [list(row) for row in matrix.data]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def add_row(src, dst, c):
        # row dst += c * row src
        s[dst] = [a + c * b for a, b in zip(s[dst], s[src])]
        u[dst] = [a + c * b for a, b in zip(u[dst], u[src])]

    def negate_row(i):
        s[i] = [-a for a in s[i]]
        u[i] = [-a for a in u[i]]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vi[i], vi[j] = vi[j], vi[i]

    def add_col(src, dst, c):
        # col dst += c * col src; inverse acts on rows of vi
        for row in s:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]
        vi[src] = [a - c * b for a, b in zip(vi[src], vi[dst])]

    def find_pivot(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = abs(s[i][j])
                if a and (best is None or a < best[0]):
                    best = (a, i, j)
        return best

    t = 0
    while True:
        pivot = find_pivot(t)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        # clear row and column t; re-pivot on remainders until clean
        while True:
            dirty = False
            for i in range(t + 1, m):
                if s[i][t]:
                    q = s[i][t] // s[t][t]
                    add_row(t, i, -q)
                    if s[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if s[t][j]:
                    q = s[t][j] // s[t][t]
                    add_col(t, j, -q)
                    if s[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty:
                break
        # force the pivot to divide the rest of the submatrix
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if s[i][j] % s[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(offender, t, 1)
            continue  # re-run clearing at the same t
        if s[t][t] < 0:
            negate_row(t)
        t += 1

    return SNFDecomposition(U=IntMatrix(u), S=IntMatrix(s), V=IntMatrix(v), v_inv=IntMatrix(vi))


def solve_diophantine(
    a: IntMatrix, b: Sequence[int]
) -> Optional[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]]:
    """Solve A*x = b over the integers.

    Returns ``(x0, kernel_basis)`` where x0 is a particular solution and
    kernel_basis is a Z-basis of ``{x : A*x = 0}``, or None when the system
    has no integer solution.
    """
    if len(b) != a.rows:
        raise ValueError("right-hand side length does not match row count")
    snf = smith_normal_form(a)
    c = snf.U.apply(b)
    n = a.cols
    diag = snf.diagonal
    y = [0] * n
    for i in range(a.rows):
        d = diag[i] if i < len(diag) else 0
        if d:
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i]:
            return None
    x0 = snf.V.apply(y)
    kernel = tuple(snf.V.column(j) for j in range(snf.rank, n))
    return x0, kernel


def frac_mod1(q: Fraction) -> Fraction:
    return q % 1


@dataclass(frozen=True)
class RatVecMod1:
    """Exact rational vector with every coordinate reduced into [0, 1)."""

    coords: tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable) -> "RatVecMod1":
        return cls(tuple(Fraction(v) % 1 for v in values))

    @classmethod
    def zero(cls, n: int) -> "RatVecMod1":
        return cls((Fraction(0),) * n)

    def __len__(self) -> int:
        return len(self.coords)

    def __add__(self, other: "RatVecMod1") -> "RatVecMod1":
        return RatVecMod1(tuple((a + b) % 1 for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "RatVecMod1":
        return RatVecMod1(tuple((-a) % 1 for a in self.coords))

    def __sub__(self, other: "RatVecMod1") -> "RatVecMod1":
        return self + (-other)

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def denominator_lcm(self) -> int:
        out = 1
        for a in self.coords:
            out = out * a.denominator // gcd(out, a.denominator)
        return out

    def pair(self, vec: Sequence[int]) -> Fraction:
        """Pairing <theta, v> = sum theta_i v_i mod 1."""
        if len(vec) != len(self.coords):
            raise ValueError("dimension mismatch in pairing")
        return sum((a * v for a, v in zip(self.coords, vec)), Fraction(0)) % 1


def act_mod1(matrix: IntMatrix, theta: RatVecMod1) -> RatVecMod1:
    """Exact image of theta under the integer matrix, reduced mod 1."""
    if matrix.rows != matrix.cols:
        raise ValueError("act_mod1 needs a square matrix")
    if matrix.cols != len(theta):
        raise ValueError(f"dimension mismatch: {matrix.rows}x{matrix.cols} acting on length {len(theta)}")
    return RatVecMod1(tuple(q % 1 for q in matrix.apply_frac(theta.coords)))
