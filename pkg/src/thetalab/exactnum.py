"""Exact integer and rational linear algebra.

Everything here works over arbitrary-precision integers and `Fraction`s;
no floating point is used on any verified path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence


class NotPositiveDefiniteError(ValueError):
    """Raised when a symmetric matrix fails a positivity test."""

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"not positive definite: non-positive pivot at index {pivot_index}")


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix stored as a tuple of row tuples."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise ValueError("ragged rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.nrows) for j in range(i)
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows))) if self.rows else self

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.rows[ij[0]][ij[1]]


@dataclass(frozen=True)
class RatMatrix:
    """Dense rational matrix; `Fraction` keeps entries reduced with positive denominator."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise ValueError("ragged rows")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        return cls(tuple(tuple(Fraction(x) for x in r) for r in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(zip(*self.rows))) if self.rows else self

    def common_denominator(self) -> int:
        d = 1
        for r in self.rows:
            for x in r:
                d = lcm(d, x.denominator)
        return d

    def scaled_int(self, d: int | None = None) -> tuple[IntMatrix, int]:
        """Clear denominators: returns (d*self as IntMatrix, d)."""
        if d is None:
            d = self.common_denominator()
        m = IntMatrix(tuple(tuple(int(x * d) for x in r) for r in self.rows))
        return m, d

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.rows[ij[0]][ij[1]]


def mat_mul_int(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    """Plain integer matrix product (small matrices only)."""
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def gram_of_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Euclidean Gram matrix of a list of row vectors."""
    n = len(rows)
    g = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = sum(rows[i][k] * rows[j][k] for k in range(len(rows[i])))
            g[i][j] = g[j][i] = s
    return g


def det_exact(m: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return 1
    a = [list(r) for r in m.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def ldl_rational(g: RatMatrix) -> tuple[list[Fraction], RatMatrix]:
    """Exact LDL^T-style factorization of a symmetric matrix: G = U^T D U.

    U is unit upper-triangular, D a list of diagonal entries.  Raises
    NotPositiveDefiniteError (with the offending pivot index) unless every
    pivot is positive.
    """
    n = g.nrows
    if g.ncols != n or any(g.rows[i][j] != g.rows[j][i] for i in range(n) for j in range(i)):
        raise ValueError("ldl_rational needs a symmetric matrix")
    a = [[Fraction(x) for x in r] for r in g.rows]
    d: list[Fraction] = []
    u = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for k in range(n):
        pivot = a[k][k]
        if pivot <= 0:
            raise NotPositiveDefiniteError(k)
        d.append(pivot)
        for j in range(k + 1, n):
            u[k][j] = a[k][j] / pivot
        for i in range(k + 1, n):
            for j in range(i, n):
                a[i][j] -= a[k][i] * a[k][j] / pivot
                a[j][i] = a[i][j]
    return d, RatMatrix(tuple(tuple(r) for r in u))


def ldl_pivots(g: IntMatrix) -> tuple[list[Fraction], int]:
    """Pivots of the LDL factorization, stopping at the first non-positive one.

    Returns (pivots, fail_index); fail_index is -1 when all pivots are positive.
    """
    try:
        d, _ = ldl_rational(RatMatrix.from_rows(g.rows))
        return d, -1
    except NotPositiveDefiniteError as e:
        return [], e.pivot_index


def is_positive_definite(g: IntMatrix) -> bool:
    _, bad = ldl_pivots(g)
    return bad == -1


def is_positive_semidefinite(g: IntMatrix) -> bool:
    """Exact PSD test via all principal minors (fine for the small g used here)."""
    n = g.nrows
    if not g.is_symmetric():
        return False
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        sub = IntMatrix.from_rows([[g.rows[i][j] for j in idx] for i in idx])
        if det_exact(sub) < 0:
            return False
    return True


def rank_int(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix, by fraction-free elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = None
        for i in range(rank, len(a)):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, len(a)):
            if a[i][col] == 0:
                continue
            q = a[i][col]
            for j in range(col, ncols):
                a[i][j] = (a[i][j] * p - q * a[rank][j]) // prev
        prev = p
        rank += 1
        if rank == len(a):
            break
    return rank


def _hnf_int_rows(rows: list[list[int]]) -> list[list[int]]:
    """Hermite-style row reduction of integer rows; returns a basis of the row Z-module."""
    work = [list(r) for r in rows if any(r)]
    if not work:
        return []
    ncols = len(work[0])
    basis: list[list[int]] = []
    col = 0
    while col < ncols and work:
        live = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        if not live:
            col += 1
            continue
        # Euclidean reduction on the current column.
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            new_live = [p]
            for r in live[1:]:
                q = r[col] // p[col]
                rr = [x - q * y for x, y in zip(r, p)]
                if rr[col] != 0:
                    new_live.append(rr)
                elif any(rr):
                    rest.append(rr)
            live = new_live
        p = live[0]
        if p[col] < 0:
            p = [-x for x in p]
        basis.append(p)
        work = rest
        col += 1
    # Reduce entries above pivots for a canonical-ish form.
    for i in reversed(range(len(basis))):
        pcol = next(j for j, x in enumerate(basis[i]) if x != 0)
        for k in range(i):
            if basis[k][pcol] != 0:
                q = basis[k][pcol] // basis[i][pcol]
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return basis


def row_basis_rational(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis (as rows) of the additive group generated by rational row vectors.

    Clears the common denominator, row-reduces over Z, and scales back.
    """
    rat = RatMatrix.from_rows(rows)
    scaled, d = rat.scaled_int()
    basis = _hnf_int_rows([list(r) for r in scaled.rows])
    return [[Fraction(x, d) for x in row] for row in basis]


def hnf_rowreduce(m: RatMatrix) -> IntMatrix:
    """Basis of the additive group generated by the rows of a rational matrix.

    The rows must generate a group of full rank (= number of columns); the
    result is returned scaled by the common denominator of the input, so it is
    an integer basis of d*(generated group).
    """
    scaled, _d = m.scaled_int()
    basis = _hnf_int_rows([list(r) for r in scaled.rows])
    if len(basis) != m.ncols:
        raise ValueError(
            f"generated group has rank {len(basis)}, expected full rank {m.ncols}"
        )
    return IntMatrix.from_rows(basis)


def solve_coordinates(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> list[Fraction] | None:
    """Coordinates of v in the row span of independent basis rows, or None.

    Solves x * basis = v exactly (Gaussian elimination on the transposed system).
    """
    k = len(basis)
    if k == 0:
        return [] if not any(v) else None
    m = len(basis[0])
    # Rows of the augmented system: (basis^T | v), one row per ambient coordinate.
    aug = [[Fraction(basis[i][c]) for i in range(k)] + [Fraction(v[c])] for c in range(m)]
    row = 0
    pivots: list[int] = []
    for col in range(k):
        piv = next((i for i in range(row, m) if aug[i][col] != 0), None)
        if piv is None:
            return None  # basis rows not independent; caller guarantees they are
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for i in range(m):
            if i != row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
    # Consistency: remaining rows must be zero.
    for i in range(row, m):
        if aug[i][k] != 0:
            return None
    return [aug[r][k] for r in range(k)]


def in_z_span(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    """Whether v lies in the Z-span of the given independent basis rows (exact)."""
    coords = solve_coordinates(basis, v)
    return coords is not None and all(c.denominator == 1 for c in coords)
