"""Exact short-vector enumeration for positive definite integer Gram matrices.

The recursion is the usual Fincke-Pohst walk over an LDL factorization, but
every bound is computed in scaled integer arithmetic (no floating point), so
the output is complete and duplicate-free by construction.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt, lcm
from typing import Callable

from .exactnum import RatMatrix, ldl_rational


def lll_gram(gram: list[list[int]], delta: Fraction = Fraction(3, 4)) -> tuple[list[list[int]], list[list[int]]]:
    """Exact LLL reduction driven by the Gram matrix alone.

    Returns (reduced_gram, u) with reduced_gram = u * gram * u^T and u unimodular.
    """
    n = len(gram)
    g = [[int(x) for x in row] for row in gram]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n <= 1:
        return g, u

    def gso():
        bstar = [Fraction(0)] * n
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            bstar[i] = Fraction(g[i][i])
            for j in range(i):
                num = Fraction(g[i][j])
                for k in range(j):
                    num -= mu[i][k] * mu[j][k] * bstar[k]
                mu[i][j] = num / bstar[j]
                bstar[i] -= mu[i][j] ** 2 * bstar[j]
        return bstar, mu

    def row_sub(i, j, q):
        # basis_i -= q * basis_j, applied to gram and transform
        for t in range(n):
            u[i][t] -= q * u[j][t]
        for t in range(n):
            g[i][t] -= q * g[j][t]
        for t in range(n):
            g[t][i] -= q * g[t][j]

    def row_swap(i, j):
        u[i], u[j] = u[j], u[i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    bstar, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = (mu[k][j].numerator * 2 + mu[k][j].denominator) // (2 * mu[k][j].denominator)
            if q != 0:
                row_sub(k, j, q)
                bstar, mu = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            row_swap(k, k - 1)
            bstar, mu = gso()
            k = max(k - 1, 1)
    return g, u


class _ScaledLdl:
    """Integer-scaled LDL data for exact bound predicates during enumeration."""

    def __init__(self, gram: list[list[int]]):
        n = len(gram)
        d, umat = ldl_rational(RatMatrix.from_rows(gram))
        self.n = n
        # Row denominators for the unit-triangular factor.
        self.m = [lcm(*[umat.rows[i][j].denominator for j in range(i, n)]) for i in range(n)]
        self.v = [[int(umat.rows[i][j] * self.m[i]) for j in range(n)] for i in range(n)]
        # Common scale so that all level weights are integers.
        scale = 1
        for i in range(n):
            scale = lcm(scale, d[i].denominator * self.m[i] * self.m[i])
        self.scale = scale
        self.w = [int(d[i] * scale) // (self.m[i] * self.m[i]) for i in range(n)]
        for i in range(n):
            assert self.w[i] * self.m[i] * self.m[i] == d[i] * scale


def _walk(gram: list[list[int]], bound: int, visit: Callable[[list[int], int], None]) -> None:
    """Visit every nonzero x with 0 < x^T gram x <= bound as (coords, norm)."""
    n = len(gram)
    if n == 0 or bound <= 0:
        return
    ldl = _ScaledLdl(gram)
    scale = ldl.scale
    w, v, m = ldl.w, ldl.v, ldl.m
    x = [0] * n
    # centers[i] holds sum_{j>i} v[i][j] * x[j]; the true center is centers[i]/m[i].
    centers = [0] * n
    top_budget = bound * scale

    def rec(i: int, budget: int):
        wi = w[i]
        ci = centers[i]
        mi = m[i]
        s = isqrt(budget // wi)
        xi_min = -((ci + s) // mi)          # ceil((-ci - s) / mi)
        xi_max = (s - ci) // mi             # floor((-ci + s) / mi)
        if i == 0:
            for xi in range(xi_min, xi_max + 1):
                t = mi * xi + ci
                rem = budget - wi * t * t
                if rem >= 0 and rem < top_budget:
                    x[0] = xi
                    visit(x, (top_budget - rem) // scale)
            return
        for xi in range(xi_min, xi_max + 1):
            t = mi * xi + ci
            rem = budget - wi * t * t
            if rem < 0:
                continue
            x[i] = xi
            for k in range(i):
                centers[k] += v[k][i] * xi
            rec(i - 1, rem)
            for k in range(i):
                centers[k] -= v[k][i] * xi

    rec(n - 1, top_budget)


def shells_upto(gram: list[list[int]], bound: int) -> dict[int, list[tuple[int, ...]]]:
    """All nonzero vectors with norm <= bound, grouped by norm (coords in the given basis)."""
    out: dict[int, list[tuple[int, ...]]] = {}
    _walk(gram, bound, lambda x, q: out.setdefault(q, []).append(tuple(x)))
    return out


def counts_upto(gram: list[list[int]], bound: int) -> dict[int, int]:
    """Counts of nonzero vectors by norm <= bound, without storing them."""
    out: dict[int, int] = {}

    def visit(_x, q):
        out[q] = out.get(q, 0) + 1

    _walk(gram, bound, visit)
    return out
