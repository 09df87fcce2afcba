"""Exact lattice-vector enumeration and representation counting.

Every theta coefficient in this package is a representation number
r_L(T) = #{ordered tuples (x_1..x_g) in L^g with Q(x_i, x_j) = T_ij}, computed
by direct counting.  Three engines cover the interesting shapes:

* an exact Fincke-Pohst walk for shells and for genus-1 counts (glued lattices
  instead get exact coset-decomposition counts, which agree and are fast),
* a bitset depth-first search over the root graph when every diagonal entry
  of T is 2 (the hot path for genus 3 and 4),
* blocked integer matrix products with histogram accumulation for genus 2.

All numpy arithmetic is integer-typed with proven no-overflow bounds, so the
results are exact; nothing here uses floating point.
"""

from __future__ import annotations

import hashlib
import os
import multiprocessing as mp
from dataclasses import dataclass
from math import isqrt
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import cosets
from .exactnum import IntMatrix, is_positive_semidefinite
from .fincke_pohst import counts_upto, lll_gram, shells_upto

if TYPE_CHECKING:  # pragma: no cover
    from .lattices import Lattice


class RepresentationDomainError(ValueError):
    """Raised when a coefficient index is not an even positive semidefinite matrix."""


# ---------------------------------------------------------------------------
# Coefficient indices


@dataclass(frozen=True)
class GramTarget:
    """Symmetric integer matrix indexing one Fourier coefficient of degree g."""

    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "GramTarget":
        t = tuple(tuple(int(x) for x in r) for r in rows)
        return cls(t)

    @classmethod
    def from_upper(cls, genus: int, upper: Sequence[int]) -> "GramTarget":
        rows = [[0] * genus for _ in range(genus)]
        it = iter(upper)
        for i in range(genus):
            for j in range(i, genus):
                v = int(next(it))
                rows[i][j] = rows[j][i] = v
        return cls.from_rows(rows)

    @classmethod
    def diagonal(cls, diag: Sequence[int]) -> "GramTarget":
        n = len(diag)
        return cls.from_rows([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, genus: int) -> "GramTarget":
        return cls.diagonal([0] * genus)

    @property
    def genus(self) -> int:
        return len(self.entries)

    @property
    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.genus))

    def upper(self) -> tuple[int, ...]:
        return tuple(
            self.entries[i][j] for i in range(self.genus) for j in range(i, self.genus)
        )

    def key(self) -> str:
        return f"{self.genus}|" + " ".join(str(x) for x in self.upper())

    def sort_key(self) -> tuple:
        return (self.trace, self.upper())

    @classmethod
    def from_key(cls, key: str) -> "GramTarget":
        head, _, rest = key.partition("|")
        upper = [int(x) for x in rest.split()] if rest else []
        return cls.from_upper(int(head), upper)

    def check_valid(self) -> None:
        g = self.genus
        for i in range(g):
            if len(self.entries[i]) != g:
                raise RepresentationDomainError("index matrix is not square")
            if self.entries[i][i] < 0 or self.entries[i][i] % 2:
                raise RepresentationDomainError("diagonal entries must be even and nonnegative")
            for j in range(g):
                if self.entries[i][j] != self.entries[j][i]:
                    raise RepresentationDomainError("index matrix must be symmetric")
        if g and not is_positive_semidefinite(IntMatrix.from_rows(self.entries)):
            raise RepresentationDomainError("index matrix must be positive semidefinite")

    def principal_submatrix(self, keep: Sequence[int]) -> "GramTarget":
        return GramTarget.from_rows([[self.entries[i][j] for j in keep] for i in keep])

    def __str__(self):
        return self.key()


# ---------------------------------------------------------------------------
# Shell tables


@dataclass(frozen=True)
class ShellTable:
    """Vectors of norm <= max_norm, grouped by norm (v and -v both present)."""

    lattice_id: str
    max_norm: int
    counts: dict[int, int]
    vectors: dict[int, list[tuple[int, ...]]] | None

    def count(self, norm: int) -> int:
        if norm == 0:
            return 1
        return self.counts.get(norm, 0)

    def get(self, norm: int, default=None):
        if self.vectors is None:
            return default
        return self.vectors.get(norm, [])


# ---------------------------------------------------------------------------
# Per-lattice context (reduced basis, numpy shells, root bitsets)

_CONTEXTS: dict[str, "_LatticeContext"] = {}


def _context(lat: "Lattice") -> "_LatticeContext":
    ctx = _CONTEXTS.get(lat.fingerprint)
    if ctx is None:
        ctx = _LatticeContext(lat)
        _CONTEXTS[lat.fingerprint] = ctx
    return ctx


class _LatticeContext:
    def __init__(self, lat: "Lattice"):
        self.fingerprint = lat.fingerprint
        self.rank = lat.rank
        self.gram = [list(r) for r in lat.gram.rows]
        self.decomposition = lat.decomposition
        if self.rank:
            self.gram_red, self.transform = lll_gram(self.gram)
        else:
            self.gram_red, self.transform = [], []
        self._gram_red_np = np.array(self.gram_red, dtype=np.int64).reshape(self.rank, self.rank)
        self._shells_np: dict[int, np.ndarray] = {}
        self._shells_bound = 0
        self._counts: dict[int, int] = {0: 1}
        self._counts_bound = 0
        self._roots = None
        self._hists: dict[tuple[int, int], dict[int, int]] = {}

    # ---- shells -----------------------------------------------------------

    def counts_upto(self, bound: int) -> dict[int, int]:
        bound = max(bound, 0)
        if bound > self._counts_bound:
            if self.decomposition is not None:
                comps, words = self.decomposition
                table = cosets.glued_shell_counts(tuple(comps), tuple(words), bound)
            else:
                table = counts_upto(self.gram_red, bound)
                table[0] = 1
            self._counts = table
            self._counts_bound = bound
        return {q: c for q, c in self._counts.items() if q <= bound}

    def shell_arrays_upto(self, bound: int) -> dict[int, np.ndarray]:
        """Numpy arrays of reduced-basis coordinates for each norm <= bound."""
        if bound > self._shells_bound:
            got = shells_upto(self.gram_red, bound)
            arrays = {}
            for q, vecs in got.items():
                arrays[q] = np.array(vecs, dtype=np.int32).reshape(len(vecs), self.rank)
            self._shells_np = arrays
            self._shells_bound = bound
        return {q: a for q, a in self._shells_np.items() if q <= bound}

    def shell_array(self, norm: int) -> np.ndarray:
        if norm == 0:
            return np.zeros((1, self.rank), dtype=np.int32)
        return self.shell_arrays_upto(norm).get(norm, np.zeros((0, self.rank), dtype=np.int32))

    def shell_vectors_original(self, bound: int) -> dict[int, list[tuple[int, ...]]]:
        """Vectors by norm, mapped back to coordinates in the original basis."""
        u = np.array(self.transform, dtype=np.int64).reshape(self.rank, self.rank)
        out: dict[int, list[tuple[int, ...]]] = {}
        for q, arr in self.shell_arrays_upto(bound).items():
            mapped = arr.astype(np.int64) @ u
            out[q] = [tuple(int(x) for x in row) for row in mapped]
        return out

    # ---- roots ------------------------------------------------------------

    def root_data(self):
        """(vectors int32 (reduced coords), dot matrix int8, neg_index, masks by dot)."""
        if self._roots is None:
            arr = self.shell_array(2)
            r = len(arr)
            if r:
                g = self._gram_red_np
                long = arr.astype(np.int64)
                dots = long @ g @ long.T
                assert dots.max(initial=0) <= 2 and dots.min(initial=0) >= -2
                dots8 = dots.astype(np.int8)
            else:
                dots8 = np.zeros((0, 0), dtype=np.int8)
            index = {tuple(int(x) for x in row): i for i, row in enumerate(arr)}
            neg = np.array([index[tuple(int(-x) for x in row)] for row in arr], dtype=np.int64)
            masks = {}
            for d in (-2, -1, 0, 1, 2):
                eq = dots8 == d
                packed = np.packbits(eq, axis=1, bitorder="little")
                masks[d] = [int.from_bytes(packed[i].tobytes(), "little") for i in range(r)]
            self._roots = (arr, dots8, neg, masks)
        return self._roots

    # ---- genus-2 dot histograms -------------------------------------------

    def pair_histogram(self, a: int, c: int, jobs: int = 1) -> dict[int, int]:
        """Histogram over ordered pairs (x, y), Q(x)=a, Q(y)=c, of Q(x, y)."""
        if a > c:
            a, c = c, a
        key = (a, c)
        hist = self._hists.get(key)
        if hist is not None:
            return hist
        x_arr = self.shell_array(a)
        y_arr = self.shell_array(c)
        hist = _dot_histogram(self._gram_red_np, x_arr, y_arr, jobs=jobs)
        self._hists[key] = hist
        return hist


def _histogram_span(gy32: np.ndarray, x_arr: np.ndarray, lo: int, hi: int, offset: int, nbins: int) -> np.ndarray:
    block = max(1, (1 << 23) // max(gy32.shape[1], 1))
    acc = np.zeros(nbins, dtype=np.int64)
    for start in range(lo, hi, block):
        d = x_arr[start : min(start + block, hi)] @ gy32
        acc += np.bincount(d.ravel().astype(np.int64) + offset, minlength=nbins)
    return acc


def _histogram_worker(span):
    st = _WORKER_STATE
    return _histogram_span(st["gy32"], st["x_arr"], span[0], span[1], st["offset"], st["nbins"])


def _sign_half(arr: np.ndarray) -> np.ndarray:
    """Rows whose first nonzero coordinate is positive (one of each +-v pair)."""
    if len(arr) == 0:
        return arr
    idx = (arr != 0).argmax(axis=1)
    lead = arr[np.arange(len(arr)), idx]
    half = arr[lead > 0]
    assert 2 * len(half) == len(arr)
    return half


def _dot_histogram(gram: np.ndarray, x_arr: np.ndarray, y_arr: np.ndarray, jobs: int = 1) -> dict[int, int]:
    """Exact histogram of x G y^T over all rows x, y; blocked integer matmul.

    Both shells are closed under negation, so only one of each +-v pair is
    multiplied out on either side and the histogram is symmetrized afterwards:
    H(b) = 2 * (Q(b) + Q(-b)) with Q the quarter-space histogram.
    """
    if len(x_arr) == 0 or len(y_arr) == 0:
        return {}
    x_arr = _sign_half(x_arr)
    y_arr = _sign_half(y_arr)
    nx, ny = len(x_arr), len(y_arr)
    rank = x_arr.shape[1]
    gy = (gram @ y_arr.astype(np.int64).T)
    max_prod = int(np.abs(x_arr).max(initial=0)) * int(np.abs(gy).max(initial=0)) * rank
    assert max_prod < 2**31, "int32 overflow bound exceeded"
    # Partial sums are bounded by max_prod, so a narrower dtype is still exact.
    dtype = np.int16 if max_prod < 2**15 else np.int32
    gy32 = gy.astype(dtype)
    x_arr = x_arr.astype(dtype)
    offset = max_prod + 1
    nbins = 2 * offset + 1
    if jobs > 1 and nx * ny > 1 << 24:
        cut = [nx * k // jobs for k in range(jobs + 1)]
        spans = [(cut[k], cut[k + 1]) for k in range(jobs)]
        _WORKER_STATE.update({"gy32": gy32, "x_arr": x_arr, "offset": offset, "nbins": nbins})
        with mp.get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_histogram_worker, spans)
        acc = sum(parts, np.zeros(nbins, dtype=np.int64))
    else:
        acc = _histogram_span(gy32, x_arr, 0, nx, offset, nbins)
    quarter = {int(b - offset): int(v) for b, v in enumerate(acc) if v}
    return {
        b: 2 * (quarter.get(b, 0) + quarter.get(-b, 0))
        for b in {b for q in quarter for b in (q, -q)}
    }


# ---------------------------------------------------------------------------
# Public shell operations


def enumerate_shells(lat: "Lattice", bound: int, store_vectors: bool = True) -> ShellTable:
    """All nonzero vectors with norm <= bound, complete and duplicate-free."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    ctx = _context(lat)
    if store_vectors:
        vectors = ctx.shell_vectors_original(bound)
        counts = {q: len(v) for q, v in vectors.items()}
        return ShellTable(lat.fingerprint, bound, counts, vectors)
    counts = {q: c for q, c in ctx.counts_upto(bound).items() if q > 0}
    return ShellTable(lat.fingerprint, bound, counts, None)


def shell_counts_upto(lat: "Lattice", bound: int) -> dict[int, int]:
    """Counts by norm for 0 <= norm <= bound (norm 0 counts the zero vector)."""
    return _context(lat).counts_upto(bound)


def shell_count(lat: "Lattice", norm: int) -> int:
    """Number of lattice vectors of the given norm."""
    if norm < 0:
        return 0
    if norm == 0:
        return 1
    cached = _cache_get(lat.fingerprint, f"1|{norm}")
    if cached is not None:
        return cached
    value = _context(lat).counts_upto(norm).get(norm, 0)
    _cache_put(lat.fingerprint, f"1|{norm}", value)
    return value


def shell_vectors(lat: "Lattice", norm: int) -> dict[int, list[tuple[int, ...]]]:
    """Vectors grouped by norm up to `norm`, in original-basis coordinates."""
    return _context(lat).shell_vectors_original(norm)


def pairwise_dots(lat: "Lattice", vectors: Sequence[Sequence[int]]) -> np.ndarray:
    """Exact inner-product matrix of vectors given in original-basis coordinates."""
    v = np.array(vectors, dtype=np.int64)
    g = np.array([list(r) for r in lat.gram.rows], dtype=np.int64)
    bound = (np.abs(v).max(initial=0) ** 2) * max(1, int(np.abs(g).max(initial=0))) * max(1, lat.rank) ** 2
    assert bound < 2**62, "dot bound exceeded"
    return v @ g @ v.T


# ---------------------------------------------------------------------------
# Coefficient cache (in-memory plus optional append-only directory)

_MEM_CACHE: dict[tuple[str, str], int] = {}

CACHE_ENV = "THETALAB_CACHE"


def _cache_dir() -> str | None:
    return os.environ.get(CACHE_ENV) or None


def cache_stats() -> dict[str, int]:
    return dict(_CACHE_STATS)


_CACHE_STATS = {"memory_hits": 0, "disk_hits": 0, "misses": 0, "writes": 0}


def _disk_path(fp: str, key: str) -> str | None:
    root = _cache_dir()
    if not root:
        return None
    h = hashlib.sha1(key.encode()).hexdigest()[:24]
    return os.path.join(root, fp[:24], f"{h}.txt")


def _cache_get(fp: str, key: str) -> int | None:
    hit = _MEM_CACHE.get((fp, key))
    if hit is not None:
        _CACHE_STATS["memory_hits"] += 1
        return hit
    path = _disk_path(fp, key)
    if path and os.path.exists(path):
        try:
            with open(path, "r", encoding="ascii") as fh:
                stored_key, _, value = fh.read().partition(" = ")
            if stored_key.strip() == key:
                n = int(value.strip())
                _MEM_CACHE[(fp, key)] = n
                _CACHE_STATS["disk_hits"] += 1
                return n
        except (OSError, ValueError):
            return None
    _CACHE_STATS["misses"] += 1
    return None


def _cache_put(fp: str, key: str, value: int) -> None:
    _MEM_CACHE[(fp, key)] = value
    path = _disk_path(fp, key)
    if not path:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    try:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL)
    except FileExistsError:
        return
    except OSError:
        return
    with os.fdopen(fd, "w", encoding="ascii") as fh:
        fh.write(f"{key} = {value}\n")
    _CACHE_STATS["writes"] += 1


# ---------------------------------------------------------------------------
# Representation numbers


def representation_count(lat: "Lattice", target, jobs: int = 1) -> int:
    """Exact number of ordered g-tuples in L^g with the prescribed Gram matrix."""
    t = target if isinstance(target, GramTarget) else GramTarget.from_rows(target)
    t.check_valid()
    key = t.key()
    cached = _cache_get(lat.fingerprint, key)
    if cached is not None:
        return cached
    value = _rep_count(lat, t, jobs)
    _cache_put(lat.fingerprint, key, value)
    return value


def _rep_count(lat: "Lattice", t: GramTarget, jobs: int) -> int:
    g = t.genus
    if g == 0:
        return 1
    # Slots with T_ii = 0 force x_i = 0; PSD already forces their rows to zero.
    nonzero = [i for i in range(g) if t.entries[i][i] > 0]
    if len(nonzero) < g:
        for i in range(g):
            if t.entries[i][i] == 0 and any(t.entries[i][j] for j in range(g)):
                return 0  # unreachable for PSD input, kept as a guard
        if not nonzero:
            return 1
        return representation_count(lat, t.principal_submatrix(nonzero), jobs)
    if g == 1:
        return shell_count(lat, t.entries[0][0])
    # Cauchy-Schwarz equality T_ij^2 = T_ii T_jj forces x_j = (T_ij/T_ii) x_i.
    for i in range(g):
        for j in range(g):
            if i == j:
                continue
            tij = t.entries[i][j]
            if tij * tij == t.entries[i][i] * t.entries[j][j] and tij % t.entries[i][i] == 0:
                lam = tij // t.entries[i][i]
                for k in range(g):
                    if k != j and t.entries[j][k] != lam * t.entries[i][k]:
                        return 0
                keep = [k for k in range(g) if k != j]
                return representation_count(lat, t.principal_submatrix(keep), jobs)
    if all(t.entries[i][i] == 2 for i in range(g)):
        return _count_root_tuples(lat, t, jobs)
    if g == 2:
        a, b, c = t.entries[0][0], t.entries[0][1], t.entries[1][1]
        return _context(lat).pair_histogram(a, c, jobs=jobs).get(b, 0)
    return _count_general(lat, t)


# ---- root-tuple engine (all diagonal entries 2) ----------------------------


def _iter_bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _root_dfs_count(masks, t_entries, g, first_candidates) -> int:
    """Count tuples with x_0 restricted to first_candidates (list of root indices)."""
    total = 0
    if g == 2:
        d = t_entries[0][1]
        md = masks[d]
        for i in first_candidates:
            total += md[i].bit_count()
        return total
    row0 = t_entries[0]
    for i in first_candidates:
        stack_masks = [masks[row0[k]][i] for k in range(1, g)]
        total += _root_dfs_level(masks, t_entries, g, 1, stack_masks)
    return total


def _root_dfs_level(masks, t_entries, g, level, level_masks) -> int:
    """Recursive levels: level_masks[k-level] constrains slot k for k >= level."""
    cur = level_masks[0]
    if level == g - 1:
        return cur.bit_count()
    row = t_entries[level]
    total = 0
    if level == g - 2:
        md = masks[row[g - 1]]
        nxt = level_masks[1]
        for i in _iter_bits(cur):
            total += (nxt & md[i]).bit_count()
        return total
    for i in _iter_bits(cur):
        nxt = [level_masks[k - level] & masks[row[k]][i] for k in range(level + 1, g)]
        if all(nxt):
            total += _root_dfs_level(masks, t_entries, g, level + 1, nxt)
    return total


_WORKER_STATE: dict = {}


def _root_dfs_worker(chunk):
    st = _WORKER_STATE
    return _root_dfs_count(st["masks"], st["t"], st["g"], chunk)


def _count_root_tuples(lat: "Lattice", t: GramTarget, jobs: int) -> int:
    ctx = _context(lat)
    arr, dots, neg, masks = ctx.root_data()
    r = len(arr)
    if r == 0:
        return 0
    g = t.genus
    # Global sign symmetry: restrict x_0 to one of each (v, -v) pair, double after.
    first = [i for i in range(r) if i < int(neg[i])]
    t_entries = tuple(tuple(row) for row in t.entries)
    if jobs > 1 and len(first) >= 4:
        chunks = [first[k::jobs] for k in range(jobs)]
        _WORKER_STATE.update({"masks": masks, "t": t_entries, "g": g})
        with mp.get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_root_dfs_worker, chunks)
        total = sum(parts)
    else:
        total = _root_dfs_count(masks, t_entries, g, first)
    return 2 * total


# ---- general engine (mixed diagonals, small shells) ------------------------


def _count_general(lat: "Lattice", t: GramTarget) -> int:
    """Depth-first filtering over stored shells; meant for small lattices or
    small bounds (work grows with the product of shell sizes)."""
    ctx = _context(lat)
    g = t.genus
    arrays = [ctx.shell_array(t.entries[i][i]) for i in range(g)]
    if any(len(a) == 0 for a in arrays):
        return 0
    work = len(arrays[0])
    for i in range(1, g):
        work *= max(1, min(len(arrays[i]), 64))
    if work > 5 * 10**7:
        raise RepresentationDomainError(
            f"general representation count too large for {t.key()} at rank {lat.rank}"
        )
    gm = ctx._gram_red_np

    def rec(level: int, chosen: list[np.ndarray]) -> int:
        arr = arrays[level]
        mask = np.ones(len(arr), dtype=bool)
        for k, xk in enumerate(chosen):
            want = t.entries[k][level]
            mask &= (arr.astype(np.int64) @ (gm @ xk)) == want
        if level == g - 1:
            return int(mask.sum())
        total = 0
        for row in arr[mask]:
            total += rec(level + 1, chosen + [row.astype(np.int64)])
        return total

    return rec(0, [])


# ---------------------------------------------------------------------------
# Profiles


def _sign_orbit_canonical(t: GramTarget) -> GramTarget:
    """Representative of the orbit of T under conjugation by diagonal +-1 matrices."""
    g = t.genus
    best = None
    for mask in range(1 << (g - 1)) if g else [0]:
        signs = [1] + [1 if (mask >> k) & 1 == 0 else -1 for k in range(g - 1)]
        rows = tuple(
            tuple(signs[i] * signs[j] * t.entries[i][j] for j in range(g)) for i in range(g)
        )
        if best is None or rows > best:
            best = rows
    return GramTarget(best)


def candidate_targets(genus: int, trace_bound: int) -> list[GramTarget]:
    """All even positive semidefinite integer matrices with trace <= bound, canonical order."""
    diags: list[tuple[int, ...]] = []

    def build_diag(prefix, remaining):
        if len(prefix) == genus:
            diags.append(tuple(prefix))
            return
        for d in range(0, remaining + 1, 2):
            build_diag(prefix + [d], remaining - d)

    build_diag([], trace_bound)
    out = []
    pairs = [(i, j) for i in range(genus) for j in range(i + 1, genus)]
    for diag in diags:
        bounds = {p: isqrt(diag[p[0]] * diag[p[1]]) for p in pairs}
        offs: list[dict] = []

        def build_off(idx, current):
            if idx == len(pairs):
                offs.append(dict(current))
                return
            i, j = pairs[idx]
            for v in range(-bounds[(i, j)], bounds[(i, j)] + 1):
                current[(i, j)] = v
                build_off(idx + 1, current)
            del current[(i, j)]

        build_off(0, {})
        for off in offs:
            rows = [[0] * genus for _ in range(genus)]
            for i in range(genus):
                rows[i][i] = diag[i]
            for (i, j), v in off.items():
                rows[i][j] = rows[j][i] = v
            if is_positive_semidefinite(IntMatrix.from_rows(rows)):
                out.append(GramTarget.from_rows(rows))
    out.sort(key=lambda t: t.sort_key())
    return out


def representation_profile(lat: "Lattice", genus: int, trace_bound: int, jobs: int = 1) -> dict[GramTarget, int]:
    """r_L(T) for every representable even PSD T with trace <= bound (zeros omitted)."""
    if genus == 0:
        return {GramTarget.zero(0): 1}
    out: dict[GramTarget, int] = {}
    canon_cache: dict[str, int] = {}
    for t in candidate_targets(genus, trace_bound):
        canon = _sign_orbit_canonical(t)
        ck = canon.key()
        if ck in canon_cache:
            val = canon_cache[ck]
        else:
            val = representation_count(lat, canon, jobs=jobs)
            canon_cache[ck] = val
        if val:
            out[t] = val
    return out
