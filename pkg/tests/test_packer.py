import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperpack.errors import CapExceeded, ParameterError
from hyperpack.packer import (
    Digraph,
    PackerConfig,
    audit_digraph_regularity,
    exact_max_packing,
    hamilton_dicycles,
    is_hamilton_dicycle,
    min_degree,
    pack_hamilton_cycles,
)


def random_digraph(nu, p, seed):
    rng = np.random.default_rng(seed)
    return Digraph(nu, frozenset((a, b) for a in range(nu) for b in range(nu) if a != b and rng.random() < p))


def test_digraph_validation():
    with pytest.raises(ParameterError):
        Digraph(3, frozenset({(1, 1)}))
    with pytest.raises(ParameterError):
        Digraph(3, frozenset({(0, 3)}))


def test_single_cycle():
    D = Digraph(5, frozenset((i, (i + 1) % 5) for i in range(5)))
    res = pack_hamilton_cycles(D, seed=0)
    assert len(res.cycles) == 1 and res.leftover_fraction == 0.0
    assert exact_max_packing(D).cycles and len(exact_max_packing(D).cycles) == 1


def test_complete_nu5_decomposes():
    D = Digraph.complete(5)
    res = pack_hamilton_cycles(D, seed=0)
    assert len(res.cycles) == 4 and not res.leftover_arcs
    assert len(exact_max_packing(D).cycles) == 4


def test_sink_vertex_means_zero():
    arcs = {(a, b) for a in range(5) for b in range(5) if a != b and a != 2}
    D = Digraph(5, frozenset(arcs))
    assert min_degree(D) == 0
    assert pack_hamilton_cycles(D, seed=1).cycles == []
    assert exact_max_packing(D).cycles == []


def test_hamilton_dicycles_count_complete():
    # (nu-1)! directed Hamilton cycles in the complete digraph
    assert len(hamilton_dicycles(Digraph.complete(5))) == 24
    assert len(hamilton_dicycles(Digraph.complete(1))) == 0


def test_heuristic_never_beats_exact():
    wins = 0
    for seed in range(30):
        D = random_digraph(6, 0.6, seed)
        h = pack_hamilton_cycles(D, seed=seed)
        ex = exact_max_packing(D)
        for c in h.cycles:
            assert is_hamilton_dicycle(D, c)
        assert len(h.cycles) <= len(ex.cycles) <= min_degree(D)
        wins += len(h.cycles) == len(ex.cycles)
    assert wins >= 18


@given(seed=st.integers(0, 10**6), p=st.floats(0.3, 1.0))
@settings(max_examples=40, deadline=None)
def test_packing_is_arc_disjoint(seed, p):
    D = random_digraph(7, p, seed)
    res = pack_hamilton_cycles(D, PackerConfig(packing_restarts=2), seed=seed)
    used = [a for c in res.cycles for a in zip(c, c[1:] + c[:1])]
    assert len(used) == len(set(used))
    assert set(used) | res.leftover_arcs == set(D.arcs)


def test_pack_deterministic():
    D = random_digraph(8, 0.7, 3)
    a = pack_hamilton_cycles(D, seed=5)
    b = pack_hamilton_cycles(D, seed=5)
    assert a.cycles == b.cycles


def test_exact_caps():
    with pytest.raises(CapExceeded):
        exact_max_packing(Digraph.complete(9))
    with pytest.raises(CapExceeded):
        exact_max_packing(Digraph.complete(7), max_arcs=40)


@pytest.mark.parametrize("nu", [5, 6, 9, 16])
def test_audit_complete_closed_form(nu):
    rep = audit_digraph_regularity(Digraph.complete(nu), 1.0)
    assert rep.eps_hat_degree == pytest.approx(1 / nu)
    assert rep.eps_hat_codegree == pytest.approx(2 / nu)
    assert rep.eps_hat_quad == pytest.approx(4 / nu)
    assert rep.eps_hat == pytest.approx(4 / nu)


def test_audit_small_nu_skips_quad():
    rep = audit_digraph_regularity(Digraph.complete(4), 1.0)
    assert rep.eps_hat_quad is None
    assert any("nu < 5" in f for f in rep.flags)


def _naive_audit(D, p):
    nu = D.nu
    A = D.arcs
    out = [{b for b in range(nu) if (a, b) in A} for a in range(nu)]
    inn = [{a for a in range(nu) if (a, b) in A} for b in range(nu)]

    def dev(c, t):
        return abs(c / t - 1)

    d1 = max(max(dev(len(out[v]), nu * p), dev(len(inn[v]), nu * p)) for v in range(nu))
    d2 = 0.0
    for a in range(nu):
        for b in range(nu):
            if a != b:
                for c in (out[a] & out[b], inn[a] & inn[b], out[a] & inn[b]):
                    d2 = max(d2, dev(len(c), nu * p * p))
    d4 = 0.0
    for a in range(nu):
        for b in range(nu):
            for c in range(nu):
                for d in range(nu):
                    distinct = len({a, b, c, d}) == 4
                    bc = b == c and len({a, b, d}) == 3
                    if distinct or bc:
                        x = out[a] & inn[b] & out[c] & inn[d]
                        d4 = max(d4, dev(len(x), nu * p**4))
    return d1, d2, d4


def test_audit_matches_naive():
    D = random_digraph(16, 0.7, 0)
    rep = audit_digraph_regularity(D, 0.7)
    d1, d2, d4 = _naive_audit(D, 0.7)
    assert rep.eps_hat_degree == pytest.approx(d1)
    assert rep.eps_hat_codegree == pytest.approx(d2)
    assert rep.eps_hat_quad == pytest.approx(d4)


def test_audit_relabel_invariant():
    D = random_digraph(9, 0.6, 4)
    perm = np.random.default_rng(1).permutation(9)
    Dp = Digraph(9, frozenset((int(perm[a]), int(perm[b])) for a, b in D.arcs))
    a, b = audit_digraph_regularity(D, 0.6), audit_digraph_regularity(Dp, 0.6)
    assert (a.eps_hat_degree, a.eps_hat_codegree, a.eps_hat_quad) == pytest.approx(
        (b.eps_hat_degree, b.eps_hat_codegree, b.eps_hat_quad)
    )


def test_audit_sampled_is_bounded_by_exhaustive():
    D = random_digraph(10, 0.5, 2)
    ex = audit_digraph_regularity(D, 0.5)
    sa = audit_digraph_regularity(D, 0.5, mode="sampled", samples=200, seed=3)
    assert sa.modes["quad"] == "sampled"
    assert sa.eps_hat <= ex.eps_hat


def test_audit_empty_flags():
    rep = audit_digraph_regularity(Digraph(6, frozenset()), 0.1)
    assert "empty digraph" in rep.flags
    assert any("sub-unit" in f for f in rep.flags)


@pytest.mark.parametrize("nu, best", [(3, 2), (4, 2), (5, 4), (6, 4)])
def test_exact_complete_digraphs(nu, best):
    # complete digraphs decompose into nu-1 Hamilton cycles except at nu = 4 and 6
    assert len(exact_max_packing(Digraph.complete(nu), max_arcs=30).cycles) == best
