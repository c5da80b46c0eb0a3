"""Seeded Monte-Carlo checks of the labeling procedure's concentration claims.

Each target runs ``trials`` independent seeded repetitions and reports the
empirical mean, its standard error, deviation quantiles and the predicted
value or band. These are report-only at desk scale; callers decide what to
assert.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from hyperpack.errors import ParameterError
from hyperpack.hypergraph import KGraph, complete_kgraph, derive_params, generate_random_kgraph
from hyperpack.labeling import (
    ProcedureParams,
    complete_graph_coverage_probability,
    condensed_count,
    edge_coverage_probability,
    partner_edges,
    random_permutation,
    run_procedure1,
)
from hyperpack.packer import Digraph, audit_digraph_regularity
from hyperpack.reduction import build_digraph

TARGETS = ("coverage", "condensed", "firstorder", "secondorder", "digraph-regularity")


@dataclass
class MCConfig:
    n: int = 8
    k: int = 3
    ell: int = 1
    p: float = 1.0
    eps: float = 0.1
    kappa: float = 3.0
    r: int = 20
    trials: int = 100
    min_trials: int = 100
    d: int = 1
    graph_seed: int = 0
    condensed_sets: int = 200


def _graph(cfg: MCConfig) -> KGraph:
    if cfg.p >= 1:
        return complete_kgraph(cfg.n, cfg.k)
    return generate_random_kgraph(cfg.n, cfg.k, cfg.p, cfg.graph_seed)


def _summary(values, predicted=None) -> dict:
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    out = {
        "trials": len(v),
        "mean": mean,
        "se": se,
        "quantiles": {str(qq): float(np.quantile(v, qq)) for qq in (0.05, 0.5, 0.95)},
    }
    if predicted is not None:
        out["predicted"] = predicted
        out["z_score"] = (mean - predicted) / se if se > 0 else (0.0 if mean == predicted else math.inf)
        dev = np.abs(v / predicted - 1) if predicted else np.abs(v)
        out["deviation_quantiles"] = {str(qq): float(np.quantile(dev, qq)) for qq in (0.5, 0.95)}
    return out


def _extension_family(H: KGraph, A: tuple[int, ...], d: int) -> list[tuple[int, ...]]:
    # brute-force enumeration, independent of the link index
    rest = [v for v in range(1, H.n + 1) if v not in A]
    return [B for B in combinations(rest, d) if tuple(sorted(A + B)) in H.edges]


def _pick_A(H: KGraph, d: int, avoid=None) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    best = None
    for A in combinations(range(1, H.n + 1), H.k - d):
        if A == avoid:
            continue
        fam = _extension_family(H, A, d)
        if fam and (best is None or len(fam) > len(best[1])):
            best = (A, fam)
    if best is None:
        raise ParameterError("no (k-d)-set has a non-empty extension family")
    return best


def lemma_montecarlo(target: str, config: MCConfig | None = None, seed: int = 0) -> dict:
    cfg = config or MCConfig()
    if target not in TARGETS:
        raise ParameterError(f"unknown target {target!r}; choose from {TARGETS}")
    if cfg.trials < cfg.min_trials:
        raise ParameterError(f"trials={cfg.trials} below the floor of {cfg.min_trials}")
    P = derive_params(cfg.k, cfg.ell, cfg.n)
    H = _graph(cfg)
    PP = ProcedureParams(cfg.kappa, cfg.r, "override", "override")
    report: dict = {"target": target, "config": asdict(cfg), "seed": seed, "params": asdict(P)}
    z = P.z

    if target == "coverage":
        # pooled over edges and trials: for the complete graph the per-trial
        # mean is fixed (sum_e |I_e| = r z |arcs|), so only the pool has spread
        pooled = []
        for t in range(cfg.trials):
            out = run_procedure1(H, P, PP, seed=seed * 1_000_003 + t)
            pooled += [len(ix) for ix in out.state.coverage.values()]
        hist = {int(c): int(f) for c, f in zip(*np.unique(pooled, return_counts=True))}
        lo, mid, hi = edge_coverage_probability(P, cfg.n, cfg.p, cfg.eps)
        report["leading_order_r_p1"] = {"low": cfg.r * lo, "mid": cfg.r * mid, "high": cfg.r * hi}
        exact = cfg.r * complete_graph_coverage_probability(P) if cfg.p >= 1 else None
        report["exact_complete_graph_r_p1"] = exact
        report["histogram"] = hist
        report["stats"] = _summary(pooled, exact if exact is not None else cfg.r * mid)
        return report

    if target == "condensed":
        rng = np.random.default_rng(seed)
        t_max = 2 * P.q - P.k
        sizes = [P.k + t for t in range(1, t_max + 1)]
        pool = []
        for size in sizes:
            if math.comb(cfg.n, size) <= cfg.condensed_sets:
                pool += list(combinations(range(1, cfg.n + 1), size))
            else:
                pool += [
                    tuple(sorted(int(v) + 1 for v in rng.choice(cfg.n, size, replace=False)))
                    for _ in range(cfg.condensed_sets)
                ]
        maxima = []
        for t in range(cfg.trials):
            Ds = [build_digraph(H, random_permutation(seed * 1_000_003 + t, cfg.n, i), P) for i in range(cfg.r)]
            maxima.append(max(condensed_count(S, Ds, H) for S in pool))
        report["bound_4q_plus_1"] = 4 * P.q + 1
        report["sets_per_trial"] = len(pool)
        report["stats"] = _summary(maxima)
        report["max_observed"] = int(max(maxima))
        return report

    if target == "firstorder":
        d = cfg.d
        A, B = _pick_A(H, d)
        values, cond = [], []
        plugin_cov = []
        for t in range(cfg.trials):
            out = run_procedure1(H, P, PP, seed=seed * 1_000_003 + t)
            packed = set().union(*out.packed_graphs) if out.packed_graphs else set()
            edges = [tuple(sorted(A + b)) for b in B]
            values.append(sum(1 for e in edges if e in packed))
            cond.append(sum(_conditional_prob(e, out) for e in edges))
            cov = [len(ix) for ix in out.state.coverage.values()]
            plugin_cov.append(sum(cov) / len(cov))
        mean_cov = float(np.mean(plugin_cov))
        report["A"] = list(A)
        report["family_size"] = len(B)
        report["conditional_expectation_mean"] = float(np.mean(cond))
        report["plugin_prediction"] = len(B) * mean_cov ** (-(z - 1)) if mean_cov > 0 else None
        centre = len(B) / cfg.kappa ** (z - 1)
        w = (z * z + z) * cfg.eps
        report["predicted_band"] = {"low": centre * (1 - w), "centre": centre, "high": centre * (1 + w)}
        report["stats"] = _summary(values, float(np.mean(cond)))
        return report

    if target == "secondorder":
        d = cfg.d
        best = None
        for A1 in combinations(range(1, cfg.n + 1), P.k - d):
            f1 = set(_extension_family(H, A1, d))
            if not f1:
                continue
            for A2 in combinations(range(1, cfg.n + 1), P.k - d):
                if A2 <= A1:
                    continue
                fam = sorted(f1.intersection(_extension_family(H, A2, d)))
                if fam and (best is None or len(fam) > len(best[2])):
                    best = (A1, A2, fam)
            if best is not None and len(best[2]) >= cfg.n - P.k - 1:
                break
        if best is None:
            raise ParameterError("no pair of (k-d)-sets shares an extension")
        A1, A2, B = best
        values = []
        for t in range(cfg.trials):
            out = run_procedure1(H, P, PP, seed=seed * 1_000_003 + t)
            packed = set().union(*out.packed_graphs) if out.packed_graphs else set()
            values.append(
                sum(1 for b in B if tuple(sorted(A1 + b)) in packed and tuple(sorted(A2 + b)) in packed)
            )
        bound = 7 * P.q * len(B) / cfg.kappa**z
        report.update({"A1": list(A1), "A2": list(A2), "family_size": len(B), "bound_7q_B_over_kappa_z": bound})
        report["stats"] = _summary(values)
        report["mean_within_bound"] = report["stats"]["mean"] <= bound
        return report

    # digraph-regularity
    dp = cfg.p**z
    rows = []
    for t in range(cfg.trials):
        D = build_digraph(H, random_permutation(seed * 1_000_003 + t, cfg.n, 0), P)
        rep = audit_digraph_regularity(Digraph.from_shift(D), dp, seed=seed + t)
        rows.append(rep)
    report["digraph_p"] = dp
    report["stats"] = _summary([r.eps_hat for r in rows])
    report["per_property_max"] = {
        "degree": max(r.eps_hat_degree for r in rows),
        "codegree": max(r.eps_hat_codegree for r in rows),
        "quad": max((r.eps_hat_quad for r in rows if r.eps_hat_quad is not None), default=None),
    }
    if cfg.p >= 1:
        nu = P.nu_q
        report["complete_digraph_closed_form"] = {
            "degree": 1 / nu, "codegree": 2 / nu, "quad": 4 / nu if nu >= 5 else None,
        }
    report["predicted_regularity_eps"] = (2 * z + 5) * cfg.eps
    return report


def _conditional_prob(e, out) -> float:
    """P(e lands in some H'_i | digraphs), given the coverage sets: e takes label j
    with probability 1/|I_e|, then each partner in D_j must also pick j."""
    ix = out.state.coverage.get(e, [])
    if not ix:
        return 0.0
    total = 0.0
    for j in ix:
        prob = 1.0 / len(ix)
        for f in partner_edges(e, out.digraphs[j]):
            prob /= len(out.state.coverage[f])
        total += prob
    return total
