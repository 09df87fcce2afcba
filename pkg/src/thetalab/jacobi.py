"""Fourier-Jacobi coefficients as joint counts, the root-moment identity, and
the coefficient-level heat equation.

The n-th Fourier-Jacobi coefficient of a degree-(g+1) theta series is stored
as the exact table N(S, l) = #{(x_1..x_g, y) : Gram(x) = S, Q(y) = 2n,
Q(y, x_i) = l_i}.  The root-moment identity r2 * Q(v,v) = c * sum_y Q(y,v)^2
is checked through the exact second-moment matrix M = sum_y (Gy)(Gy)^T: the
matrix equality r2 * G = c * M is equivalent to the identity holding for every
vector of the lattice at once, and a direct per-vector double loop over
enumerated shells cross-checks it on small norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import enumeration
from .enumeration import GramTarget, representation_count, shell_count
from .lattices import LatticeError

if TYPE_CHECKING:  # pragma: no cover
    from .lattices import Lattice


@dataclass
class JacobiCoefficient:
    """Joint counts N(S, l) for all S with trace <= trace_bound."""

    genus: int
    index: int  # the n of the q^n coefficient; y ranges over vectors of norm 2n
    trace_bound: int
    entries: dict[tuple[GramTarget, tuple[int, ...]], int]

    def count(self, s: GramTarget, ell: Sequence[int]) -> int:
        return self.entries.get((s, tuple(int(x) for x in ell)), 0)

    def by_target(self, s: GramTarget) -> dict[tuple[int, ...], int]:
        return {ell: c for (t, ell), c in self.entries.items() if t == s}

    def second_moment(self, s: GramTarget, i: int, j: int) -> int:
        """Exact sum over l of l_i * l_j * N(S, l)."""
        return sum(ell[i] * ell[j] * c for (t, ell), c in self.entries.items() if t == s)


def _ell_tables_for_target(lat: "Lattice", s: GramTarget, two_n: int) -> dict[tuple[int, ...], int]:
    """Joint l-histogram for one index S: pairs every Gram-S tuple with every
    vector of norm 2n."""
    g = s.genus
    r_shell = shell_count(lat, two_n)
    if r_shell == 0:
        return {}
    nonzero = [i for i in range(g) if s.entries[i][i] > 0]
    if len(nonzero) < g:
        inner = _ell_tables_for_target(lat, s.principal_submatrix(nonzero), two_n)
        out = {}
        for ell, c in inner.items():
            full = [0] * g
            for pos, val in zip(nonzero, ell):
                full[pos] = val
            out[tuple(full)] = c
        return out
    if g == 0:
        return {(): r_shell}
    ctx = enumeration._context(lat)
    gram = ctx._gram_red_np
    y_arr = ctx.shell_array(two_n).astype(np.int64)
    if g == 1:
        hist = enumeration._dot_histogram(gram, ctx.shell_array(s.entries[0][0]), ctx.shell_array(two_n))
        return {(ell,): c for ell, c in hist.items()}
    from math import isqrt

    offs = [isqrt(two_n * s.entries[i][i]) for i in range(g)]
    widths = [2 * o + 1 for o in offs]
    nbins = 1
    for w in widths:
        nbins *= w
    acc = np.zeros(nbins, dtype=np.int64)
    if g == 2 and all(s.entries[i][i] == 2 for i in range(g)):
        # Pairs of roots: group the second slot by the first and use the exact
        # dot table, so nothing is materialized per tuple.
        arr, _dots, _neg, masks = ctx.root_data()
        gy = gram @ y_arr.T
        dots_y = arr.astype(np.int64) @ gy  # roots x |shell|
        b = s.entries[0][1]
        for i1 in range(len(arr)):
            idx2 = list(enumeration._iter_bits(masks[b][i1]))
            if not idx2:
                continue
            key = (dots_y[i1] + offs[0]) * widths[1] + dots_y[idx2] + offs[1]
            acc += np.bincount(key.ravel(), minlength=nbins)
    else:
        # General shape: enumerate the Gram-S tuples, then histogram joint dots.
        tuples = _enumerate_tuples(lat, s)
        if not tuples:
            return {}
        gy = gram @ y_arr.T  # rank x |shell|
        for tup in tuples:
            key = np.zeros(y_arr.shape[0], dtype=np.int64)
            for i in range(g):
                key = key * widths[i] + (tup[i] @ gy + offs[i])
            acc += np.bincount(key, minlength=nbins)
    out: dict[tuple[int, ...], int] = {}
    for flat, c in enumerate(acc):
        if not c:
            continue
        ell = []
        rem = flat
        for i in range(g - 1, -1, -1):
            ell.append(rem % widths[i] - offs[i])
            rem //= widths[i]
        out[tuple(reversed(ell))] = int(c)
    return out


def _enumerate_tuples(lat: "Lattice", s: GramTarget, limit: int = 300000) -> list[np.ndarray]:
    """All ordered tuples (reduced coordinates) with Gram matrix S."""
    ctx = enumeration._context(lat)
    g = s.genus
    gram = ctx._gram_red_np
    arrays = [ctx.shell_array(s.entries[i][i]).astype(np.int64) for i in range(g)]
    if any(len(a) == 0 for a in arrays):
        return []
    out: list[np.ndarray] = []

    def rec(level: int, chosen: list[np.ndarray]):
        arr = arrays[level]
        mask = np.ones(len(arr), dtype=bool)
        for k, xk in enumerate(chosen):
            mask &= (arr @ (gram @ xk)) == s.entries[k][level]
        if level == g - 1:
            for row in arr[mask]:
                out.append(np.stack(chosen + [row]))
                if len(out) > limit:
                    raise LatticeError("tuple enumeration exceeded limit")
            return
        for row in arr[mask]:
            rec(level + 1, chosen + [row])

    rec(0, [])
    return out


def jacobi_coefficient(lat: "Lattice", genus: int, index: int, trace_bound: int, jobs: int = 1) -> JacobiCoefficient:
    """Exact joint counts for the index-n Fourier-Jacobi coefficient."""
    if index < 1:
        raise ValueError("Fourier-Jacobi index must be >= 1")
    two_n = 2 * index
    entries: dict[tuple[GramTarget, tuple[int, ...]], int] = {}
    if shell_count(lat, two_n):
        for s in enumeration.candidate_targets(genus, trace_bound):
            table = _ell_tables_for_target(lat, s, two_n)
            for ell, c in table.items():
                if c:
                    entries[(s, ell)] = c
    return JacobiCoefficient(genus=genus, index=index, trace_bound=trace_bound, entries=entries)


# ---------------------------------------------------------------------------
# Root second-moment identity


@dataclass(frozen=True)
class VenkovReport:
    lattice_id: str
    r2: int
    constant: Fraction
    checked_norm_bound: int
    consistent: bool
    verified_vectors: int  # vectors re-checked by the direct per-vector double loop


def _root_moment_matrix(lat: "Lattice") -> tuple[int, list[list[int]]]:
    """(r2, M) with M = sum over roots y of (G y)(G y)^T, exactly."""
    table = enumeration.shell_vectors(lat, 2)
    roots = table.get(2, [])
    r2 = len(roots)
    if r2 == 0:
        raise LatticeError("no roots: the moment identity is vacuous")
    g = np.array([list(r) for r in lat.gram.rows], dtype=np.int64)
    y = np.array(roots, dtype=np.int64)
    gy = y @ g  # rows are (G y)^T
    assert int(np.abs(gy).max()) ** 2 * r2 < 2**62
    m = gy.T @ gy
    return r2, [[int(x) for x in row] for row in m]


def venkov_constant(lat: "Lattice", norm_bound: int = 8, per_vector_norm_cap: int = 4) -> VenkovReport:
    """The unique c with r2 * Q(v,v) = c * sum_{roots y} Q(y,v)^2 for every v.

    Both sides are quadratic forms in v, so the identity for all v (any norm
    bound) is exactly the matrix equality r2 * G = c * M with M the root
    second-moment matrix; that equality is what is checked.  Vectors with norm
    up to per_vector_norm_cap are additionally re-verified by the direct
    double loop over roots.
    """
    r2, m = _root_moment_matrix(lat)
    gram = lat.gram.rows
    n = lat.rank
    c = None
    consistent = True
    for i in range(n):
        for j in range(n):
            lhs = r2 * gram[i][j]
            rhs = m[i][j]
            if rhs == 0:
                if lhs != 0:
                    consistent = False
                continue
            ratio = Fraction(lhs, rhs)
            if c is None:
                c = ratio
            elif ratio != c:
                consistent = False
    if c is None:
        consistent = False
        c = Fraction(0)
    verified = 0
    if consistent and per_vector_norm_cap > 0:
        g64 = np.array([list(r) for r in gram], dtype=np.int64)
        shells = enumeration.shell_vectors(lat, min(norm_bound, per_vector_norm_cap))
        roots = np.array(shells.get(2, []), dtype=np.int64)
        gy = roots @ g64
        for norm, vecs in sorted(shells.items()):
            for v in vecs:
                varr = np.array(v, dtype=np.int64)
                dots = gy @ varr
                rhs_direct = int((dots * dots).sum())
                if r2 * norm * c.denominator != c.numerator * rhs_direct:
                    consistent = False
                verified += 1
    return VenkovReport(
        lattice_id=lat.name,
        r2=r2,
        constant=c,
        checked_norm_bound=norm_bound,
        consistent=consistent,
        verified_vectors=verified,
    )


def heat_coefficient_check(
    lat: "Lattice",
    genus: int,
    s: GramTarget,
    c: Fraction,
    jacobi: JacobiCoefficient | None = None,
    jobs: int = 1,
) -> bool:
    """Exact identity r2 * S_ij * r_L(S) = c * sum_l l_i l_j N(S, l) for i <= j."""
    s.check_valid()
    r2 = shell_count(lat, 2)
    if jacobi is None:
        jacobi = jacobi_coefficient(lat, genus, 1, s.trace, jobs=jobs)
    r_s = representation_count(lat, s, jobs=jobs)
    for i in range(genus):
        for j in range(i, genus):
            moment = jacobi.second_moment(s, i, j)
            lhs = r2 * s.entries[i][j] * r_s
            if lhs * c.denominator != c.numerator * moment:
                return False
    return True


def pair_difference_f1_check(left: "Lattice", right: "Lattice", genus: int, trace_bound: int, jobs: int = 1) -> bool:
    """Verify the chain used for same-root-count pairs: equal root numbers, one
    shared constant c, and the first Fourier-Jacobi second moments of both
    lattices pinned to their representation numbers by the heat identity."""
    r2_left = shell_count(left, 2)
    r2_right = shell_count(right, 2)
    if r2_left != r2_right:
        raise LatticeError(f"root counts differ: {r2_left} != {r2_right}")
    rep_left = venkov_constant(left, per_vector_norm_cap=2)
    rep_right = venkov_constant(right, per_vector_norm_cap=2)
    if not (rep_left.consistent and rep_right.consistent and rep_left.constant == rep_right.constant):
        return False
    c = rep_left.constant
    for lat in (left, right):
        jac = jacobi_coefficient(lat, genus, 1, trace_bound, jobs=jobs)
        for s in enumeration.candidate_targets(genus, trace_bound):
            if not heat_coefficient_check(lat, genus, s, c, jacobi=jac, jobs=jobs):
                return False
    return True
