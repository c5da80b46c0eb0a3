"""Round-by-round peeling: label, pack, lift, delete, repeat.

The schedule follows
    x_t = (eps_t^2 / (6 (k+1) ln n))^(z-1)
    eps_{t+1} = eps_t (1 + 7 z^3 x_t),    p_{t+1} = p_t (1 - x_t)
and stops at the first T with p_T <= eps^alpha p / 2, alpha = 1/(9 + 7 z^3).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from hyperpack.errors import ParameterError, ValidationError
from hyperpack.hypergraph import Edge, KGraph, Params
from hyperpack.labeling import compute_procedure_params, run_procedure1
from hyperpack.packer import Digraph, PackerConfig, pack_hamilton_cycles
from hyperpack.reduction import TypeLCycle, lift_cycle, validate_type_l_cycle

MAX_SCHEDULE_STEPS = 10**7


def alpha_of(z: int) -> float:
    return 1.0 / (9 + 7 * z**3)


@dataclass
class PeelSchedule:
    eps_t: list[float]
    p_t: list[float]
    x_t: list[float]
    alpha: float
    T: int
    threshold: float
    truncated: bool = False
    regime_exit: bool = False
    diagnostic: str | None = None


def compute_schedule(P: Params, n: int, p: float, eps: float, max_steps: int = MAX_SCHEDULE_STEPS) -> PeelSchedule:
    """Iterate the (eps_t, p_t) recursion until the stopping rule fires.

    If some x_t >= 1 the density p_{t+1} is clamped to 0 (``regime_exit``),
    which also ends the schedule. x_0 >= 1 yields an empty, truncated schedule.
    """
    if eps <= 0 or p <= 0:
        raise ParameterError(f"need eps > 0 and p > 0, got eps={eps}, p={p}")
    z = P.z
    c = 6 * (P.k + 1) * math.log(n)
    growth = 7 * z**3
    alpha = alpha_of(z)
    threshold = 0.5 * eps**alpha * p
    eps_t, p_t, x_t = [eps], [p], []
    x0 = (eps**2 / c) ** (z - 1)
    if x0 >= 1:
        return PeelSchedule(
            eps_t, p_t, [x0], alpha, 0, threshold, truncated=True,
            diagnostic=f"x_0 = {x0:.4g} >= 1: recursion leaves (0, 1) immediately",
        )
    regime_exit = False
    while p_t[-1] > threshold:
        if len(x_t) >= max_steps:
            return PeelSchedule(
                eps_t, p_t, x_t, alpha, len(p_t) - 1, threshold, truncated=True,
                diagnostic=f"schedule exceeded {max_steps} steps",
            )
        e, q = eps_t[-1], p_t[-1]
        x = (e**2 / c) ** (z - 1)
        x_t.append(x)
        eps_t.append(e * (1 + growth * x))
        if x >= 1:
            regime_exit = True
            p_t.append(0.0)
        else:
            p_t.append(q * (1 - x))
    T = len(p_t) - 1
    x_t.append((eps_t[-1] ** 2 / c) ** (z - 1))
    diag = "x_t >= 1 at the final step; density clamped to 0" if regime_exit else None
    return PeelSchedule(eps_t, p_t, x_t, alpha, T, threshold, regime_exit=regime_exit, diagnostic=diag)


def schedule_step_ratios(S: PeelSchedule, z: int) -> list[tuple[float, float]]:
    """Per step: (eps_{t+1}/eps_t, (p_t/p_{t+1})^(7 z^3)), with inf when p_{t+1} = 0."""
    growth = 7 * z**3
    out = []
    for t in range(S.T):
        lhs = S.eps_t[t + 1] / S.eps_t[t]
        if S.p_t[t + 1] <= 0:
            rhs = math.inf
        else:
            rhs = math.exp(growth * math.log(S.p_t[t] / S.p_t[t + 1]))
        out.append((lhs, rhs))
    return out


def verify_schedule_inequality(z: int, grid: Sequence[float], slack: float = 1e-12) -> bool:
    """Check (1 + 7 z^3 x)(1 - x)^(7 z^3) <= 1 + slack at every grid point."""
    if z < 2:
        raise ParameterError(f"z must be >= 2, got {z}")
    x = np.asarray(grid, dtype=float)
    if np.any((x < 0) | (x >= 1)):
        raise ParameterError("grid points must lie in [0, 1)")
    g = 7 * z**3
    vals = (1 + g * x) * np.exp(g * np.log1p(-x))
    return bool(np.all(vals <= 1 + slack))


# --------------------------------------------------------------------------


@dataclass
class RoundOverrides:
    kappa: float | None = None
    r: int | None = None
    max_rounds: int | None = None
    r_budget: int = 10**6


@dataclass
class RoundStats:
    round: int
    eps_t: float
    p_t: float
    kappa: float
    r: int
    kappa_mode: str
    r_mode: str
    edges_in: int
    edges_in_packed_graphs: int
    edges_unlabeled: int
    cycles: int
    edges_in_cycles: int
    edges_lost: int
    edges_out: int
    leftover_fractions: list[float]
    nu_q_parity: str


@dataclass
class PackingResult:
    cycles: list[TypeLCycle]
    per_round: list[RoundStats]
    uncovered_fraction: float
    covered_fraction: float
    edges_total: int
    edges_in_cycles: int
    edges_lost: int
    edges_residual: int
    stop_reason: str
    manifest: dict = field(default_factory=dict, repr=False)


def run_peeling(
    H: KGraph,
    P: Params,
    schedule: PeelSchedule,
    overrides: RoundOverrides | None = None,
    seed: int = 0,
    packer: PackerConfig | None = None,
) -> PackingResult:
    overrides = overrides or RoundOverrides()
    packer = packer or PackerConfig()
    if P.n % P.q:
        raise ParameterError(f"n={P.n} is not divisible by q={P.q}")
    rounds = schedule.T
    if overrides.max_rounds is not None:
        rounds = min(rounds, overrides.max_rounds)

    Ht = H
    cycles: list[TypeLCycle] = []
    stats: list[RoundStats] = []
    used: set[Edge] = set()
    stop = "schedule exhausted" if rounds == schedule.T else "max_rounds reached"
    for t in range(rounds):
        eps_t, p_t = schedule.eps_t[t], schedule.p_t[t]
        PP = compute_procedure_params(P, P.n, p_t, eps_t, overrides.kappa, overrides.r, overrides.r_budget)
        out = run_procedure1(Ht, P, PP, seed=_round_seed(seed, t))
        acc = out.accounting()
        round_cycles = 0
        leftovers = []
        for i, Dp in enumerate(out.filtered):
            dg = Digraph.from_shift(Dp)
            packing = pack_hamilton_cycles(dg, packer, seed=_round_seed(seed, t, i))
            leftovers.append(packing.leftover_fraction)
            for dicycle in packing.cycles:
                C = lift_cycle(Dp, dicycle)
                ok, why = validate_type_l_cycle(H, C, P)
                if not ok or used.intersection(C.edge_sequence):
                    raise ValidationError(
                        f"round {t}, digraph {i}, cycle {dicycle}: "
                        f"{why or 'edge reused across cycles'}"
                    )
                used.update(C.edge_sequence)
                cycles.append(C)
                round_cycles += 1
        packed_edges = round_cycles * P.nu_ell
        lost = acc["edges_packed_graphs"] - packed_edges
        Hn = out.residual
        stats.append(
            RoundStats(
                round=t, eps_t=eps_t, p_t=p_t, kappa=PP.kappa, r=PP.r,
                kappa_mode=PP.kappa_mode, r_mode=PP.r_mode, edges_in=Ht.m,
                edges_in_packed_graphs=acc["edges_packed_graphs"],
                edges_unlabeled=acc["edges_unlabeled"], cycles=round_cycles,
                edges_in_cycles=packed_edges, edges_lost=lost, edges_out=Hn.m,
                leftover_fractions=leftovers,
                nu_q_parity="even" if P.nu_q % 2 == 0 else "odd",
            )
        )
        if Ht.m != packed_edges + lost + Hn.m:
            raise ValidationError(f"round {t}: conservation identity violated")
        Ht = Hn
        if round_cycles == 0:
            stop = "round packed no cycles"
            break

    in_cycles = sum(s.edges_in_cycles for s in stats)
    lost = sum(s.edges_lost for s in stats)
    if len(used) != in_cycles or not used <= H.edges:
        raise ValidationError("global edge-disjointness violated")
    if H.m != in_cycles + lost + Ht.m:
        raise ValidationError("global conservation identity violated")
    total = H.m
    uncovered = (total - in_cycles) / total if total else 1.0
    covered = 1.0 - uncovered
    result = PackingResult(cycles, stats, uncovered, covered, total, in_cycles, lost, Ht.m, stop)
    result.manifest = build_manifest(result, P, schedule, overrides, seed, packer)
    return result


def _round_seed(seed: int, *ids: int) -> int:
    # fold round/digraph ids into a child seed; stream() keys remain independent
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(ids))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def build_manifest(
    R: PackingResult, P: Params, S: PeelSchedule, O: RoundOverrides, seed: int, packer: PackerConfig
) -> dict:
    return {
        "params": asdict(P),
        "seed": seed,
        "schedule": {
            "alpha": S.alpha, "T": S.T, "threshold": S.threshold,
            "eps_0": S.eps_t[0], "p_0": S.p_t[0],
            "truncated": S.truncated, "regime_exit": S.regime_exit,
            "diagnostic": S.diagnostic,
        },
        "overrides": asdict(O),
        "round_indexing": "kappa_t and r_t are both recomputed from (eps_t, p_t) each round",
        "log_base": "natural",
        "packer": asdict(packer),
        "per_round": [asdict(s) for s in R.per_round],
        "accounting": {
            "edges_total": R.edges_total,
            "edges_in_cycles": R.edges_in_cycles,
            "edges_lost_in_packer_leftover": R.edges_lost,
            "edges_residual": R.edges_residual,
            "identity_holds": R.edges_total == R.edges_in_cycles + R.edges_lost + R.edges_residual,
        },
        "uncovered_fraction": R.uncovered_fraction,
        "covered_fraction": R.covered_fraction,
        "stop_reason": R.stop_reason,
        "cycles": [list(C.vertex_order) for C in R.cycles],
    }


def manifest_json(R: PackingResult) -> str:
    return json.dumps(R.manifest, sort_keys=True, indent=2)
