"""Command line harness.

    hyperpack [--seed S] [--config cfg.json] [--out DIR] <command> [options]

Commands: generate, audit, reduce, procedure1, pack, peel, lemma-check, verify.
Exit codes: 0 success, 2 validation failure, 3 parameter rejection.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

from hyperpack.errors import ParameterError, ValidationError
from hyperpack.hypergraph import derive_params, generate_random_kgraph, read_kgraph, write_kgraph
from hyperpack.labeling import compute_procedure_params, coverage_histogram, random_permutation, run_procedure1
from hyperpack.montecarlo import TARGETS, MCConfig, lemma_montecarlo
from hyperpack.packer import Digraph, PackerConfig, pack_hamilton_cycles
from hyperpack.peeling import RoundOverrides, compute_schedule, run_peeling, verify_schedule_inequality
from hyperpack.reduction import TypeLCycle, build_digraph, read_digraph_dump, validate_type_l_cycle, write_digraph_dump
from hyperpack.regularity import audit_definition1, audit_L_property

log = logging.getLogger("hyperpack")

EXIT_OK, EXIT_VALIDATION, EXIT_PARAMS = 0, 2, 3

# checked after --config defaults are merged, so a config file may supply them
REQUIRED = {
    "generate": ("n", "k", "p"),
    "audit": ("graph", "ell", "p"),
    "reduce": ("graph", "ell"),
    "procedure1": ("graph", "ell", "p", "eps"),
    "pack": ("digraph",),
    "peel": ("graph", "ell", "p", "eps"),
    "lemma-check": ("target",),
}


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    raise TypeError(f"not serializable: {type(x)}")


def _table(rows: list[tuple], header: tuple) -> str:
    rows = [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:>{w}}}" for w in widths)
    return "\n".join([fmt.format(*header)] + [fmt.format(*r) for r in rows])


def read_cycles(path) -> list[list[int]]:
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append([int(t) for t in line.split()])
    return out


def write_cycles(cycles, path: Path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for c in cycles:
            fh.write(" ".join(map(str, c)) + "\n")


# --------------------------------------------------------------------------


def cmd_generate(a) -> int:
    H = generate_random_kgraph(a.n, a.k, a.p, a.seed)
    path = a.out / a.output
    write_kgraph(H, path, comment=f"binomial k-graph n={a.n} k={a.k} p={a.p} seed={a.seed}")
    print(f"wrote {path}: n={H.n} k={H.k} m={H.m}")
    return EXIT_OK


def cmd_audit(a) -> int:
    H = read_kgraph(a.graph)
    P = derive_params(H.k, a.ell, H.n, check_divisibility=False)
    if a.property:
        rep = audit_L_property(H, P, a.p, a.property, a.mode, a.samples, a.seed)
        payload = asdict(rep)
        print(_table([(rep.property_id, rep.mode, rep.tested_configs, f"{rep.target:.4g}", f"{rep.worst_ratio:.4f}")],
                     ("property", "mode", "configs", "target", "worst_ratio")))
    else:
        rep = audit_definition1(H, P, a.p, a.eps, a.mode, a.samples, a.seed)
        payload = rep.to_json()
        rows = [(c.d, c.s, c.tested, f"{c.target:.4g}", f"{c.worst_ratio:.4f}", "sub-unit" if c.sub_unit_target else "")
                for c in rep.cells]
        print(_table(rows, ("d", "s", "tested", "target", "worst_ratio", "flag")))
        print(f"epsilon_hat = {rep.epsilon_hat:.6f}  violations(eps={a.eps}) = {rep.n_violations}")
    _dump_json(payload, a.out / "audit.json")
    return EXIT_OK


def cmd_reduce(a) -> int:
    H = read_kgraph(a.graph)
    P = derive_params(H.k, a.ell, H.n)
    sigma = random_permutation(a.seed, H.n, a.index)
    D = build_digraph(H, sigma, P)
    path = a.out / a.output
    write_digraph_dump(D, path, comment=f"shift digraph seed={a.seed} index={a.index}")
    print(f"wrote {path}: nu_q={D.nu} arcs={len(D.owned)} owned_edges={len(D.edge_owner)}")
    return EXIT_OK


def cmd_procedure1(a) -> int:
    H = read_kgraph(a.graph)
    P = derive_params(H.k, a.ell, H.n)
    PP = compute_procedure_params(P, H.n, a.p, a.eps, a.kappa, a.r, a.r_budget)
    out = run_procedure1(H, P, PP, a.seed, low_memory=a.low_memory)
    manifest = {
        "params": asdict(P),
        "procedure": asdict(PP),
        "seed": a.seed,
        "streamed": out.streamed,
        "accounting": out.accounting(),
        "coverage": coverage_histogram(out, P, a.p),
        "packed_graph_sizes": [len(h) for h in out.packed_graphs],
        "filtered_arcs": [len(D.owned) for D in out.filtered],
    }
    _dump_json(manifest, a.out / "procedure1.json")
    write_kgraph(out.residual, a.out / "residual.txt", comment="residual after deleting all H'_i")
    acc = manifest["accounting"]
    print(f"kappa={PP.kappa} ({PP.kappa_mode}) r={PP.r} ({PP.r_mode}); "
          f"|E(H)|={acc['edges_H']} = residual {acc['edges_residual']} + packed {acc['edges_packed_graphs']}")
    return EXIT_OK if acc["identity_holds"] else EXIT_VALIDATION


def cmd_pack(a) -> int:
    nu, q, blocks, owned = read_digraph_dump(a.digraph)
    D = Digraph(nu, frozenset(owned))
    cfg = PackerConfig(a.fail_budget, a.steps_per_nu, a.restarts)
    res = pack_hamilton_cycles(D, cfg, a.seed)
    lifted = [[v for i in c for v in blocks[i]] for c in res.cycles]
    write_cycles(lifted, a.out / a.output, comment="vertex-id orders of packed Hamilton cycles")
    summary = {
        "nu": nu, "q": q, "arcs": len(D.arcs), "cycles": len(res.cycles),
        "block_cycles": res.cycles, "leftover_fraction": res.leftover_fraction,
        "attempts": res.attempts, "nu_parity": "even" if nu % 2 == 0 else "odd", "config": asdict(cfg),
    }
    _dump_json(summary, a.out / "pack.json")
    print(f"packed {len(res.cycles)} cycles; leftover fraction {res.leftover_fraction:.4f}")
    return EXIT_OK


def cmd_peel(a) -> int:
    H = read_kgraph(a.graph)
    P = derive_params(H.k, a.ell, H.n)
    S = compute_schedule(P, H.n, a.p, a.eps)
    O = RoundOverrides(a.kappa, a.r, a.rounds, a.r_budget)
    R = run_peeling(H, P, S, O, a.seed, PackerConfig(a.fail_budget, a.steps_per_nu, a.restarts))
    _dump_json(R.manifest, a.out / "manifest.json")
    with open(a.out / "rounds.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "eps_t", "p_t", "kappa", "r", "edges_in", "edges_in_packed_graphs",
                    "cycles", "edges_in_cycles", "edges_lost", "edges_out"])
        for s in R.per_round:
            w.writerow([s.round, s.eps_t, s.p_t, s.kappa, s.r, s.edges_in, s.edges_in_packed_graphs,
                        s.cycles, s.edges_in_cycles, s.edges_lost, s.edges_out])
    write_cycles([C.vertex_order for C in R.cycles], a.out / "cycles.txt", comment="type-ell Hamilton cycles")
    eps_alpha = a.eps**S.alpha
    print(f"T={S.T} rounds_run={len(R.per_round)} cycles={len(R.cycles)} "
          f"uncovered={R.uncovered_fraction:.4f} (eps^alpha={eps_alpha:.4f}) stop: {R.stop_reason}")
    return EXIT_OK


def cmd_lemma_check(a) -> int:
    cfg = MCConfig(n=a.n, k=a.k, ell=a.ell, p=a.p, eps=a.eps, kappa=a.kappa, r=a.r,
                   trials=a.trials, d=a.d, graph_seed=a.graph_seed)
    rep = lemma_montecarlo(a.target, cfg, a.seed)
    _dump_json(rep, a.out / f"lemma-{a.target}.json")
    st = rep["stats"]
    print(f"{a.target}: trials={st['trials']} mean={st['mean']:.5g} se={st['se']:.3g}"
          + (f" predicted={st['predicted']:.5g} z={st['z_score']:.2f}" if "predicted" in st else ""))
    return EXIT_OK


def cmd_verify(a) -> int:
    failed = 0
    if a.schedule_z is not None:
        grid = [i / a.grid for i in range(a.grid)]
        ok = verify_schedule_inequality(a.schedule_z, grid)
        print(f"schedule inequality z={a.schedule_z} on {a.grid} points: {'ok' if ok else 'FAILED'}")
        failed += not ok
    if a.cycles:
        if not a.graph:
            raise ParameterError("--cycles requires --graph")
        H = read_kgraph(a.graph)
        P = derive_params(H.k, a.ell, H.n, check_divisibility=False)
        used = set()
        orders = read_cycles(a.cycles)
        for idx, order in enumerate(orders):
            n = len(order)
            seq = tuple(tuple(sorted(order[(j * P.ell + t) % n] for t in range(P.k))) for j in range(n // P.ell))
            ok, why = validate_type_l_cycle(H, TypeLCycle(seq, tuple(order)), P)
            if ok and used.intersection(seq):
                ok, why = False, "shares an edge with an earlier cycle"
            used.update(seq)
            if not ok:
                failed += 1
                print(f"cycle {idx}: INVALID ({why})")
        print(f"checked cycles: {len(orders)}, invalid: {failed}")
    return EXIT_VALIDATION if failed else EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperpack", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", type=Path, help="JSON file of option defaults")
    ap.add_argument("--out", type=Path, default=Path("."))
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    def packer_opts(p):
        p.add_argument("--fail-budget", type=int, default=20)
        p.add_argument("--steps-per-nu", type=int, default=200)
        p.add_argument("--restarts", type=int, default=8)

    p = sub.add_parser("generate", help="sample a binomial random k-graph")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--output", default="graph.txt")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("audit", help="empirical (eps,p)-regularity audit")
    p.add_argument("--graph", type=Path)
    p.add_argument("--ell", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="sampled")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--property", choices=[f"L{i}" for i in range(1, 9)])
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("reduce", help="build one shift digraph and write its dump")
    p.add_argument("--graph", type=Path)
    p.add_argument("--ell", type=int)
    p.add_argument("--index", type=int, default=0, help="permutation stream index")
    p.add_argument("--output", default="digraph.txt")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("procedure1", help="run the labeling procedure once")
    p.add_argument("--graph", type=Path)
    p.add_argument("--ell", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--r-budget", type=int, default=10**6)
    p.add_argument("--low-memory", action="store_true")
    p.set_defaults(func=cmd_procedure1)

    p = sub.add_parser("pack", help="pack Hamilton cycles in a digraph dump")
    p.add_argument("--digraph", type=Path)
    p.add_argument("--output", default="cycles.txt")
    packer_opts(p)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("peel", help="run the multi-round packing pipeline")
    p.add_argument("--graph", type=Path)
    p.add_argument("--ell", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--r-budget", type=int, default=10**6)
    packer_opts(p)
    p.set_defaults(func=cmd_peel)

    p = sub.add_parser("lemma-check", help="Monte-Carlo check of a concentration claim")
    p.add_argument("--target", choices=TARGETS)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--kappa", type=float, default=3.0)
    p.add_argument("--r", type=int, default=20)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--graph-seed", type=int, default=0)
    p.set_defaults(func=cmd_lemma_check)

    p = sub.add_parser("verify", help="validate cycle files and/or the schedule inequality")
    p.add_argument("--graph", type=Path)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--cycles", type=Path)
    p.add_argument("--schedule-z", type=int)
    p.add_argument("--grid", type=int, default=1000)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if a.config:
        cfg = {key.replace("-", "_"): v for key, v in json.loads(a.config.read_text()).items()}
        for action in ap._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**cfg)
        ap.set_defaults(**{k: v for k, v in cfg.items() if k in ("seed", "out")})
        a = ap.parse_args(argv)
    try:
        missing = [opt for opt in REQUIRED.get(a.command, ()) if getattr(a, opt) is None]
        if missing:
            raise ParameterError(f"{a.command}: missing " + ", ".join("--" + m.replace("_", "-") for m in missing))
        a.out.mkdir(parents=True, exist_ok=True)
        return a.func(a)
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ParameterError as exc:
        print(f"parameter rejected: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
