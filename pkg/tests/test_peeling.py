import json
import math

import numpy as np
import pytest

from conftest import params
from hyperpack.errors import ParameterError
from hyperpack.hypergraph import complete_kgraph, generate_random_kgraph
from hyperpack.peeling import (
    RoundOverrides,
    alpha_of,
    compute_schedule,
    manifest_json,
    run_peeling,
    schedule_step_ratios,
    verify_schedule_inequality,
)


def test_alpha():
    assert alpha_of(2) == pytest.approx(1 / 65)
    assert alpha_of(3) == pytest.approx(1 / 198)


def _replay(k, z, n, p, eps):
    # plain re-implementation of the recursion, used as the oracle
    c = 6 * (k + 1) * math.log(n)
    thr = 0.5 * eps ** (1 / (9 + 7 * z**3)) * p
    e, q, xs = eps, p, []
    while q > thr:
        x = (e * e / c) ** (z - 1)
        xs.append(x)
        e *= 1 + 7 * z**3 * x
        q = 0.0 if x >= 1 else q * (1 - x)
    return xs, e, q


def test_schedule_replay_large_n():
    P = params(3, 1, 10**4)
    S = compute_schedule(P, 10**4, 0.5, 0.1)
    xs, e, q = _replay(3, 2, 10**4, 0.5, 0.1)
    assert S.T == len(xs)
    assert S.x_t[: S.T] == pytest.approx(xs, rel=1e-12)
    assert S.eps_t[-1] == pytest.approx(e, rel=1e-12)
    assert S.x_t[0] == pytest.approx(0.01 / (24 * math.log(10**4)))


def test_z2_exponent_is_one():
    # with z = 2 the step size is eps_t^2 / (6 (k+1) ln n) to the first power
    P = params(5, 2, 16)
    S = compute_schedule(P, 16, 0.8, 0.3)
    assert P.z == 2
    assert S.x_t[0] == pytest.approx(0.09 / (36 * math.log(16)))


def test_schedule_monotone_and_ratio():
    P = params(4, 1, 12)
    S = compute_schedule(P, 12, 0.9, 0.2)
    assert all(b > a for a, b in zip(S.eps_t, S.eps_t[1:]))
    assert all(b < a for a, b in zip(S.p_t, S.p_t[1:]))
    for lhs, rhs in schedule_step_ratios(S, P.z):
        assert lhs <= rhs * (1 + 1e-12)
    assert S.p_t[S.T] <= S.threshold


def test_regime_exit_flagged():
    P = params(3, 1, 12)
    S = compute_schedule(P, 12, 1.0, 0.5)
    assert S.regime_exit and S.p_t[-1] == 0.0
    assert schedule_step_ratios(S, P.z)[-1][1] == math.inf


def test_truncated_when_x0_too_big():
    P = params(3, 1, 8)
    S = compute_schedule(P, 8, 1.0, 8.0)
    assert S.truncated and S.T == 0 and "x_0" in S.diagnostic


def test_schedule_errors():
    P = params(3, 1, 8)
    with pytest.raises(ParameterError):
        compute_schedule(P, 8, 1.0, 0.0)


@pytest.mark.parametrize("z", [2, 3, 4])
def test_inequality_grid(z):
    assert verify_schedule_inequality(z, np.linspace(0, 1, 1000, endpoint=False))


def test_inequality_negative_control():
    # the bound really is tight: a larger multiplier breaks it near x = 0
    g = 7 * 8
    x = 1e-3
    assert (1 + (g + 5) * x) * (1 - x) ** g > 1
    with pytest.raises(ParameterError):
        verify_schedule_inequality(2, [1.0])
    with pytest.raises(ParameterError):
        verify_schedule_inequality(1, [0.5])


def test_empty_schedule_packs_nothing():
    H, P = complete_kgraph(8, 3), params(3, 1, 8)
    S = compute_schedule(P, 8, 1.0, 8.0)
    R = run_peeling(H, P, S, seed=0)
    assert R.cycles == [] and R.uncovered_fraction == 1.0
    assert R.edges_residual == H.m


def test_single_digraph_rounds_pack_cycles():
    # r = 1 keeps every arc, so the packer sees the full shift digraph
    H, P = complete_kgraph(8, 3), params(3, 1, 8)
    S = compute_schedule(P, 8, 1.0, 0.5)
    R = run_peeling(H, P, S, RoundOverrides(kappa=1, r=1, max_rounds=3), seed=0)
    assert R.cycles
    assert R.uncovered_fraction < 1
    assert R.edges_total == R.edges_in_cycles + R.edges_lost + R.edges_residual
    seen = set()
    for C in R.cycles:
        assert len(C.edge_sequence) == P.nu_ell
        assert not seen.intersection(C.edge_sequence)
        seen.update(C.edge_sequence)


def test_peeling_random_graph_conservation():
    H, P = generate_random_kgraph(12, 3, 0.9, seed=0), params(3, 1, 12)
    S = compute_schedule(P, 12, 0.9, 0.5)
    R = run_peeling(H, P, S, RoundOverrides(kappa=1, r=2, max_rounds=4), seed=3)
    for st in R.per_round:
        assert st.edges_in == st.edges_in_cycles + st.edges_lost + st.edges_out
        assert st.nu_q_parity == "even"
    assert R.manifest["accounting"]["identity_holds"]


def test_manifest_replays():
    H, P = complete_kgraph(8, 3), params(3, 1, 8)
    S = compute_schedule(P, 8, 1.0, 0.5)
    O = RoundOverrides(kappa=1, r=1, max_rounds=2)
    a = manifest_json(run_peeling(H, P, S, O, seed=11))
    b = manifest_json(run_peeling(H, P, S, O, seed=11))
    assert a == b
    assert json.loads(a)["log_base"] == "natural"


def test_peeling_needs_q_divides_n():
    from hyperpack.hypergraph import derive_params

    P = derive_params(3, 1, 9, check_divisibility=False)
    H = complete_kgraph(9, 3)
    S = compute_schedule(P, 9, 1.0, 0.5)
    with pytest.raises(ParameterError):
        run_peeling(H, P, S)
