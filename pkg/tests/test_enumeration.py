import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetalab import enumeration as en
from thetalab.enumeration import (
    GramTarget,
    RepresentationDomainError,
    candidate_targets,
    enumerate_shells,
    representation_count,
    representation_profile,
    shell_count,
    shell_counts_upto,
)
from thetalab.lattices import direct_sum, from_gram, root_lattice
from thetalab.niemeier import builtin


from oracles import e8_ambient_counts, ldl_box_counts


@pytest.mark.parametrize(
    "kind,rank,bound",
    [("A", 1, 8), ("A", 2, 8), ("D", 4, 8)],
)
def test_shells_match_ldl_box_oracle(kind, rank, bound):
    lat = root_lattice(kind, rank)
    gram = [list(r) for r in lat.gram.rows]
    expect = ldl_box_counts(gram, bound)
    got = {q: c for q, c in shell_counts_upto(lat, bound).items() if q > 0}
    assert got == expect


def test_e8_shells_match_ambient_oracle_to_norm_8():
    lat = builtin("E8")
    expect = e8_ambient_counts(8)
    got = {q: c for q, c in shell_counts_upto(lat, 8).items() if q > 0}
    assert got == expect
    assert got[2] == 240 and got[4] == 2160


def test_known_small_shells():
    assert shell_count(root_lattice("A", 1), 2) == 2
    assert shell_count(builtin("E8"), 0) == 1
    assert shell_count(builtin("D16+"), 2) == 480


def test_enumerate_shells_structure():
    table = enumerate_shells(builtin("E8"), 4)
    assert set(table.counts) == {2, 4}
    for q, vecs in table.vectors.items():
        assert len(vecs) == table.counts[q]
        seen = set(vecs)
        assert len(seen) == len(vecs)  # duplicate-free
        for v in vecs:
            assert tuple(-x for x in v) in seen  # v and -v together
    assert table.count(0) == 1


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["A2", "D4"]), st.permutations(range(4)))
def test_shell_counts_invariant_under_basis_change(name, perm):
    kind, rank = name[0], int(name[1])
    lat = root_lattice(kind, rank)
    g = [list(r) for r in lat.gram.rows]
    n = len(g)
    # Unimodular change of basis: permutation plus one shear.
    p = [i % n for i in perm[:n]]
    if sorted(p) != list(range(n)):
        p = list(range(n))
    u = [[1 if j == p[i] else 0 for j in range(n)] for i in range(n)]
    u[0] = [a + b for a, b in zip(u[0], u[-1])] if n > 1 else u[0]
    g2 = [[sum(u[i][a] * g[a][b] * u[j][b] for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]
    lat2 = from_gram("changed", g2)
    assert shell_counts_upto(lat2, 6) == shell_counts_upto(lat, 6)


def test_representation_zero_matrix():
    e8 = builtin("E8")
    for g in range(4):
        assert representation_count(e8, GramTarget.zero(g)) == 1


def test_representation_count_e8_values():
    e8 = builtin("E8")
    assert representation_count(e8, [[2]]) == 240
    assert representation_count(e8, [[2, 1], [1, 2]]) == 13440


def test_pair_count_brute_force_oracle():
    e8 = builtin("E8")
    roots = enumerate_shells(e8, 2).vectors[2]
    dots = en.pairwise_dots(e8, roots)
    for b in (-2, -1, 0, 1, 2):
        expect = int((dots == b).sum())
        got = representation_count(e8, [[2, b], [b, 2]])
        assert got == expect
    assert representation_count(e8, [[2, 1], [1, 2]]) == 13440


def test_triple_count_brute_force_oracle_on_a2():
    a2 = root_lattice("A", 2)
    vecs = enumerate_shells(a2, 2).vectors[2]
    dots = en.pairwise_dots(a2, vecs)
    t = [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    expect = 0
    n = len(vecs)
    for i in range(n):
        for j in range(n):
            if dots[i][j] != -1:
                continue
            for k in range(n):
                if dots[i][k] == -1 and dots[j][k] == -1:
                    expect += 1
    # 6 choices of x1, 2 partners at angle 120, and x3 = -x1-x2 forced.
    assert representation_count(a2, t) == expect == 12


def test_sign_symmetry():
    e8 = builtin("E8")
    assert representation_count(e8, [[2, 1], [1, 2]]) == representation_count(e8, [[2, -1], [-1, 2]])
    t1 = [[2, 1, 0], [1, 2, -1], [0, -1, 2]]
    t2 = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]  # negate slot 1
    assert representation_count(e8, t1) == representation_count(e8, t2)


def test_permutation_symmetry():
    e8 = builtin("E8")
    t = [[2, 1, 0], [1, 2, -1], [0, -1, 4]]
    base = representation_count(e8, t)
    for perm in itertools.permutations(range(3)):
        tp = [[t[perm[i]][perm[j]] for j in range(3)] for i in range(3)]
        assert representation_count(e8, tp) == base


def test_proportional_slot_collapse():
    e8 = builtin("E8")
    assert representation_count(e8, [[2, 2], [2, 2]]) == 240  # pairs (x, x)
    assert representation_count(e8, [[2, -2], [-2, 2]]) == 240  # pairs (x, -x)
    assert representation_count(e8, [[2, 4], [4, 8]]) == 240  # pairs (x, 2x)
    assert representation_count(e8, [[8, 4], [4, 2]]) == 240  # pairs (2x, x)


def test_direct_sum_shell_convolution():
    a1 = root_lattice("A", 1)
    s = direct_sum(a1, a1)
    for norm in (2, 4, 6, 8):
        expect = sum(
            shell_count(a1, a) * shell_count(a1, norm - a) for a in range(0, norm + 1, 2)
        )
        assert shell_count(s, norm) == expect


def test_profile_genus0():
    prof = representation_profile(builtin("E8"), 0, 4)
    assert len(prof) == 1 and list(prof.values()) == [1]


def test_profile_e8_g1():
    prof = representation_profile(builtin("E8"), 1, 4)
    flat = {t.key(): c for t, c in prof.items()}
    assert flat == {"1|0": 1, "1|2": 240, "1|4": 2160}


def test_profile_e8_g2_contains_both_signs():
    prof = representation_profile(builtin("E8"), 2, 4)
    flat = {t.key(): c for t, c in prof.items()}
    assert flat["2|2 1 2"] == 13440
    assert flat["2|2 -1 2"] == 13440


def test_parallel_determinism():
    e8 = builtin("E8")
    t = [[2, 0, 0], [0, 2, 0], [0, 0, 2]]
    lone = representation_count(e8, t, jobs=1)
    en._MEM_CACHE.clear()
    multi = representation_count(e8, t, jobs=2)
    assert lone == multi


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(en.CACHE_ENV, str(tmp_path))
    e8 = builtin("E8")
    t = [[2, 1], [1, 2]]
    v1 = representation_count(e8, t)
    files = list(tmp_path.rglob("*.txt"))
    assert files
    en._MEM_CACHE.clear()
    v2 = representation_count(e8, t)
    assert v1 == v2 == 13440
    # cache is safe to delete
    for f in files:
        f.unlink()
    en._MEM_CACHE.clear()
    assert representation_count(e8, t) == 13440


def test_candidate_targets_g1():
    keys = [t.key() for t in candidate_targets(1, 4)]
    assert keys == ["1|0", "1|2", "1|4"]


def test_candidate_targets_psd_filter():
    keys = {t.upper() for t in candidate_targets(2, 4)}
    assert (2, 2, 2) in keys  # det 0 allowed
    assert (0, 1, 0) not in keys  # indefinite
    assert (2, 2, 0) not in keys  # negative minor


def test_gram_target_round_trip():
    t = GramTarget.from_rows([[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]])
    assert GramTarget.from_key(t.key()) == t
    assert t.trace == 8 and t.genus == 4


def test_domain_errors():
    e8 = builtin("E8")
    with pytest.raises(RepresentationDomainError):
        representation_count(e8, [[1]])  # odd diagonal
    with pytest.raises(RepresentationDomainError):
        representation_count(e8, [[2, 3], [3, 2]])  # not PSD
    with pytest.raises(RepresentationDomainError):
        representation_count(e8, [[2, 1], [0, 2]])  # not symmetric
