import math
from itertools import combinations, permutations

import pytest

from conftest import params
from hyperpack.errors import CapExceeded, ParameterError
from hyperpack.hypergraph import KGraph, complete_kgraph, generate_random_kgraph
from hyperpack.regularity import (
    audit_definition1,
    audit_L_property,
    l_pattern,
    l_property_count,
)


def test_complete_sampled_worst_ratio():
    # unions reach k + 2q = 7 vertices, so the smallest count is C(12-7, 1) = 5 against 12
    H, P = complete_kgraph(12, 3), params(3, 1, 12)
    rep = audit_definition1(H, P, 1.0, 0.1, mode="sampled", samples=300, seed=0)
    assert rep.epsilon_hat == pytest.approx(7 / 12)
    assert rep.n_violations > 0


def test_empty_graph_deviation_is_one():
    H, P = KGraph(8, 3, frozenset()), params(3, 1, 8)
    rep = audit_definition1(H, P, 0.5, 0.1, mode="sampled", samples=50)
    assert rep.epsilon_hat == pytest.approx(1.0)


def test_p_zero_rejected_on_nonempty():
    H, P = complete_kgraph(8, 3), params(3, 1, 8)
    with pytest.raises(ParameterError):
        audit_definition1(H, P, 0.0, 0.1)


def test_exhaustive_dominates_sampled():
    H, P = generate_random_kgraph(8, 3, 0.7, seed=4), params(3, 1, 8)
    cells = [(1, 1), (1, 2), (1, 3)]
    ex = audit_definition1(H, P, 0.7, 0.1, mode="exhaustive", cells=cells)
    sa = audit_definition1(H, P, 0.7, 0.1, mode="sampled", samples=200, cells=cells, seed=9)
    assert ex.epsilon_hat >= sa.epsilon_hat


def test_exhaustive_relabel_invariant():
    H, P = generate_random_kgraph(8, 3, 0.6, seed=2), params(3, 1, 8)
    pi = {v: (v * 3) % 8 + 1 for v in range(1, 9)}
    assert sorted(pi.values()) == list(range(1, 9))
    Hp = KGraph(8, 3, frozenset(tuple(pi[v] for v in e) for e in H.edges))
    cells = [(1, 1), (1, 2)]
    a = audit_definition1(H, P, 0.6, 0.1, mode="exhaustive", cells=cells)
    b = audit_definition1(Hp, P, 0.6, 0.1, mode="exhaustive", cells=cells)
    assert a.epsilon_hat == b.epsilon_hat
    assert [c.worst_ratio for c in a.cells] == [c.worst_ratio for c in b.cells]


def test_sampled_counts_match_naive_loop():
    H, P = generate_random_kgraph(30, 3, 0.8, seed=0), params(3, 1, 30)
    rep = audit_definition1(H, P, 0.8, 0.1, samples=40, seed=3, keep_records=True)
    assert rep.records
    for d, s, fam, count in rep.records:
        naive = 0
        for w in range(1, 31):
            if all(w not in A and tuple(sorted(A + (w,))) in H.edges for A in fam):
                naive += 1
        assert count == naive, (d, s, fam)
        assert len(set().union(*fam)) <= P.span


def test_sampled_is_seed_deterministic():
    H, P = generate_random_kgraph(16, 3, 0.5, seed=0), params(3, 1, 16)
    a = audit_definition1(H, P, 0.5, 0.2, samples=50, seed=1)
    b = audit_definition1(H, P, 0.5, 0.2, samples=50, seed=1)
    assert a.to_json() == b.to_json()


def test_sub_unit_cells_never_violate():
    H, P = generate_random_kgraph(8, 3, 0.1, seed=0), params(3, 1, 8)
    rep = audit_definition1(H, P, 0.1, 0.01, samples=20, cells=[(1, 4)])
    assert rep.cells[0].sub_unit_target
    assert rep.n_violations == 0


def test_exhaustive_cap():
    H, P = complete_kgraph(12, 3), params(3, 1, 12)
    with pytest.raises(CapExceeded):
        audit_definition1(H, P, 1.0, 0.1, mode="exhaustive", cap=1000)


def test_bad_cell():
    H, P = complete_kgraph(8, 3), params(3, 1, 8)
    with pytest.raises(ParameterError):
        audit_definition1(H, P, 1.0, 0.1, cells=[(2, 1)])


def test_L1_complete():
    # (n - q) ordered completions against n p^1
    H, P = complete_kgraph(8, 3), params(3, 1, 8)
    rep = audit_L_property(H, P, 1.0, "L1", mode="exhaustive")
    assert rep.target == 8
    assert rep.worst_ratio == pytest.approx(0.25)
    assert rep.tested_configs == 8 * 7


def test_L4_brute_force():
    H, P = generate_random_kgraph(20, 3, 0.7, seed=0), params(3, 1, 20)
    pat = l_pattern(P, "L4")
    rng_configs = [(1, 2, 3, 4), (1, 2, 3, 2), (5, 9, 1, 5), (7, 8, 8, 9), (11, 3, 4, 11)]
    for seq in rng_configs:
        x, y = seq[:2], seq[2:]
        naive = sum(
            1
            for w in range(1, 21)
            if w not in x and w not in y
            and tuple(sorted(x + (w,))) in H.edges
            and tuple(sorted(y + (w,))) in H.edges
        )
        assert l_property_count(H, pat, seq) == naive


def test_L4_sampler_respects_constraints():
    H, P = generate_random_kgraph(12, 3, 0.7, seed=0), params(3, 1, 12)
    rep = audit_L_property(H, P, 0.7, "L4", samples=200, seed=2)
    assert rep.tested_configs == 200


def test_L3_equals_L4_when_ell_divides_k():
    H, P = generate_random_kgraph(8, 3, 0.6, seed=5), params(3, 1, 8)
    p3, p4 = l_pattern(P, "L3"), l_pattern(P, "L4")
    assert p3.seq_len == p4.seq_len and p3.d == p4.d and p3.s == p4.s
    for seq in permutations(range(1, 9), 4):
        assert l_property_count(H, p3, seq) == l_property_count(H, p4, seq)


@pytest.mark.parametrize("pid", ["L6", "L8"])
def test_L6_L8_need_ell_not_dividing_k(pid):
    with pytest.raises(ParameterError, match="not dividing"):
        l_pattern(params(3, 1, 8), pid)
    assert l_pattern(params(5, 2, 16), pid).d == 1


@pytest.mark.parametrize("pid", ["L5", "L7"])
def test_L5_L7_need_ell_dividing_k(pid):
    with pytest.raises(ParameterError):
        l_pattern(params(5, 2, 16), pid)
    assert l_pattern(params(3, 1, 8), pid).d == 1


def test_L5_complete_closed_form():
    # complete graph: C(n - u, d) d! with u the union size
    H, P = complete_kgraph(10, 3), params(3, 1, 10)
    pat = l_pattern(P, "L5")
    seq = tuple(range(1, pat.seq_len + 1))
    fam = pat.build(seq)
    u = len(set().union(*fam))
    assert l_property_count(H, pat, seq) == math.comb(10 - u, 1)


def test_L8_pattern_shapes():
    P = params(5, 2, 16)
    pat = l_pattern(P, "L8")
    fam = pat.build(tuple(range(1, pat.seq_len + 1)))
    assert len(fam) == 2 * P.z
    assert all(len(A) == P.k - pat.d for A in fam)


def test_unknown_property():
    with pytest.raises(ParameterError):
        l_pattern(params(3, 1, 8), "L9")


def test_exhaustive_family_count():
    H, P = complete_kgraph(6, 3), params(3, 1, 6)
    rep = audit_definition1(H, P, 1.0, 0.5, mode="exhaustive", cells=[(1, 2)], keep_records=True)
    pairs = combinations(combinations(range(1, 7), 2), 2)
    assert rep.samples_tested == sum(1 for a, b in pairs if len(set(a) | set(b)) <= P.span)
