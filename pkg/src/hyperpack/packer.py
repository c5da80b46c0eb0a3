"""Arc-disjoint Hamilton cycle packing in digraphs.

Two engines:

* :func:`pack_hamilton_cycles` greedily extracts one Hamilton cycle at a
  time from the residual arc set using randomized rotation-extension, and
  repeats the whole greedy pass a few times keeping the best packing.
* :func:`exact_max_packing` enumerates every Hamilton cycle of a small
  digraph and finds a maximum arc-disjoint family by branch and bound.

Also home to the digraph (eps, p)-regularity audit (degrees, co-degrees and
the four-vertex pattern count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from hyperpack.errors import CapExceeded, ParameterError, ValidationError
from hyperpack.rng import stream

Arc = tuple[int, int]


@dataclass(frozen=True)
class Digraph:
    nu: int
    arcs: frozenset[Arc]

    def __post_init__(self):
        arcs = frozenset((int(a), int(b)) for a, b in self.arcs)
        for a, b in arcs:
            if a == b:
                raise ParameterError(f"self-loop at {a}")
            if not (0 <= a < self.nu and 0 <= b < self.nu):
                raise ParameterError(f"arc ({a}, {b}) outside 0..{self.nu - 1}")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def complete(cls, nu: int) -> "Digraph":
        return cls(nu, frozenset((a, b) for a in range(nu) for b in range(nu) if a != b))

    @classmethod
    def from_shift(cls, D) -> "Digraph":
        return cls(D.nu, frozenset(D.owned))

    def out_masks(self) -> list[int]:
        masks = [0] * self.nu
        for a, b in self.arcs:
            masks[a] |= 1 << b
        return masks

    def in_masks(self) -> list[int]:
        masks = [0] * self.nu
        for a, b in self.arcs:
            masks[b] |= 1 << a
        return masks


def is_hamilton_dicycle(D: Digraph, cycle: Sequence[int]) -> bool:
    cyc = list(cycle)
    if len(cyc) != D.nu or sorted(cyc) != list(range(D.nu)):
        return False
    return all((a, b) in D.arcs for a, b in zip(cyc, cyc[1:] + cyc[:1]))


def cycle_arcs(cycle: Sequence[int]) -> list[Arc]:
    cyc = list(cycle)
    return list(zip(cyc, cyc[1:] + cyc[:1]))


# --------------------------------------------------------------------------
# regularity audit


@dataclass
class DigraphRegularityReport:
    nu: int
    p: float
    eps_hat_degree: float
    eps_hat_codegree: float
    eps_hat_quad: float | None
    eps_hat: float
    modes: dict[str, str]
    tested: dict[str, int]
    flags: list[str] = field(default_factory=list)


def _dev(count: int, target: float) -> float:
    if target == 0:
        return 0.0 if count == 0 else math.inf
    return abs(count / target - 1.0)


def _quad_tuples(nu: int) -> Iterable[tuple[int, int, int, int]]:
    for a, b, c, d in permutations(range(nu), 4):
        yield a, b, c, d
    for a, b, d in permutations(range(nu), 3):
        yield a, b, b, d


def audit_digraph_regularity(
    D: Digraph,
    p: float,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    cap: int = 10**7,
) -> DigraphRegularityReport:
    """Worst relative deviations of degrees (target nu*p), co-degrees (nu*p^2)
    and the a->x->b, c->x->d pattern count (nu*p^4).

    Degrees are always exhaustive; pairs and quadruples are exhaustive when
    mode is ``exhaustive`` and their number is within ``cap``, sampled otherwise.
    The quadruple property needs nu >= 5 and is skipped (None) below that.
    """
    if not 0 <= p <= 1:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    nu = D.nu
    out, inn = D.out_masks(), D.in_masks()
    flags: list[str] = []
    modes: dict[str, str] = {"degree": "exhaustive"}
    tested: dict[str, int] = {}
    if not D.arcs:
        flags.append("empty digraph")

    t1, t2, t4 = nu * p, nu * p**2, nu * p**4
    for name, t in (("degree", t1), ("codegree", t2), ("quad", t4)):
        if t < 1:
            flags.append(f"sub-unit target for {name}: {t:.3g}")

    dev1 = 0.0
    for a in range(nu):
        dev1 = max(dev1, _dev(out[a].bit_count(), t1), _dev(inn[a].bit_count(), t1))
    tested["degree"] = nu

    rng = stream(seed, "digraph-audit", nu)

    def pair_dev(a, b):
        return max(
            _dev((out[a] & out[b]).bit_count(), t2),
            _dev((inn[a] & inn[b]).bit_count(), t2),
            _dev((out[a] & inn[b]).bit_count(), t2),
        )

    dev2 = 0.0
    if nu >= 2:
        if mode == "exhaustive" and nu * (nu - 1) <= cap:
            modes["codegree"] = "exhaustive"
            pairs = [(a, b) for a in range(nu) for b in range(nu) if a != b]
        else:
            modes["codegree"] = "sampled"
            pairs = [tuple(rng.choice(nu, 2, replace=False)) for _ in range(samples)]
        for a, b in pairs:
            dev2 = max(dev2, pair_dev(int(a), int(b)))
        tested["codegree"] = len(pairs)

    def quad_dev(a, b, c, d):
        return _dev((out[a] & inn[b] & out[c] & inn[d]).bit_count(), t4)

    dev4: float | None
    if nu < 5:
        dev4 = None
        flags.append("quad property skipped: nu < 5")
    else:
        n_quads = nu * (nu - 1) * (nu - 2) * (nu - 3) + nu * (nu - 1) * (nu - 2)
        dev4 = 0.0
        if mode == "exhaustive" and n_quads <= cap:
            modes["quad"] = "exhaustive"
            quads: Iterable = _quad_tuples(nu)
            tested["quad"] = n_quads
        else:
            modes["quad"] = "sampled"
            quads = []
            for _ in range(samples):
                if rng.random() < 0.5:
                    a, b, c, d = (int(x) for x in rng.choice(nu, 4, replace=False))
                else:
                    a, b, d = (int(x) for x in rng.choice(nu, 3, replace=False))
                    c = b
                quads.append((a, b, c, d))
            tested["quad"] = samples
        for a, b, c, d in quads:
            dev4 = max(dev4, quad_dev(a, b, c, d))

    overall = max(x for x in (dev1, dev2, dev4) if x is not None)
    return DigraphRegularityReport(nu, p, dev1, dev2, dev4, overall, modes, tested, flags)


# --------------------------------------------------------------------------
# heuristic packing


@dataclass(frozen=True)
class PackerConfig:
    fail_budget: int = 20
    steps_per_nu: int = 200
    packing_restarts: int = 8


@dataclass
class DiPacking:
    cycles: list[list[int]]
    leftover_arcs: set[Arc]
    leftover_fraction: float
    attempts: int = 0
    engine: str = "heuristic"


def _pick(cands: list[int], outdeg: Sequence[int], rng: np.random.Generator) -> int:
    best = min(outdeg[v] for v in cands)
    ties = [v for v in cands if outdeg[v] == best]
    return ties[int(rng.integers(len(ties)))]


def _rotate(path: list[int], pos: dict[int, int], out: list[set[int]], rng) -> bool:
    """Change the path's tail without losing vertices. Returns False if no rotation exists.

    With path v0..vt and arcs vt->vi, v(i-1)->vj (i < j <= t) the path
    v0..v(i-1), vj..vt, vi..v(j-1) has tail v(j-1). An arc vt->v0 closes a
    cycle that can be reopened at any point instead.
    """
    t = len(path) - 1
    tail = path[-1]
    back = [pos[u] for u in out[tail] if u in pos]
    if not back:
        return False
    order = rng.permutation(len(back))
    for idx in order:
        i = back[idx]
        if i == 0:
            if t == 0:
                continue
            m = int(rng.integers(1, t + 1))
            path[:] = path[m:] + path[:m]
        else:
            prev = path[i - 1]
            js = [pos[u] for u in out[prev] if u in pos and i < pos[u] <= t]
            if not js:
                continue
            j = js[int(rng.integers(len(js)))]
            path[:] = path[:i] + path[j:] + path[i:j]
        pos.clear()
        pos.update((v, x) for x, v in enumerate(path))
        return True
    return False


def _extract_cycle(nu, out, inn, rng, budget) -> list[int] | None:
    if nu == 1 or any(not out[v] or not inn[v] for v in range(nu)):
        return None
    outdeg = [len(s) for s in out]
    steps = 0
    while steps < budget:
        start = int(rng.integers(nu))
        path = [start]
        pos = {start: 0}
        while steps < budget:
            steps += 1
            if len(path) == nu:
                if path[0] in out[path[-1]]:
                    return path
                if not _rotate(path, pos, out, rng):
                    break
                continue
            cands = [v for v in out[path[-1]] if v not in pos]
            if cands:
                v = _pick(cands, outdeg, rng)
                pos[v] = len(path)
                path.append(v)
                continue
            cands = [v for v in inn[path[0]] if v not in pos]
            if cands:
                v = _pick(cands, outdeg, rng)
                path.insert(0, v)
                pos.clear()
                pos.update((u, x) for x, u in enumerate(path))
                continue
            if not _rotate(path, pos, out, rng):
                break
    return None


def _greedy_pack(D: Digraph, config: PackerConfig, rng) -> tuple[list[list[int]], int]:
    nu = D.nu
    out = [set() for _ in range(nu)]
    inn = [set() for _ in range(nu)]
    for a, b in D.arcs:
        out[a].add(b)
        inn[b].add(a)
    cycles: list[list[int]] = []
    fails = attempts = 0
    budget = config.steps_per_nu * nu
    while fails < config.fail_budget:
        attempts += 1
        cyc = _extract_cycle(nu, out, inn, rng, budget)
        if cyc is None:
            fails += 1
            # a vertex without in- or out-arcs can never be on a Hamilton cycle
            if any(not out[v] or not inn[v] for v in range(nu)):
                break
            continue
        fails = 0
        for a, b in cycle_arcs(cyc):
            out[a].discard(b)
            inn[b].discard(a)
        cycles.append(cyc)
    return cycles, attempts


def _finish(D: Digraph, cycles: list[list[int]], attempts: int, engine: str) -> DiPacking:
    used: set[Arc] = set()
    for cyc in cycles:
        if not is_hamilton_dicycle(D, cyc):
            raise ValidationError(f"{engine} packer produced a non-Hamiltonian cycle {cyc}")
        arcs = cycle_arcs(cyc)
        if used.intersection(arcs):
            raise ValidationError(f"{engine} packer produced overlapping cycles")
        used.update(arcs)
    leftover = set(D.arcs) - used
    frac = len(leftover) / len(D.arcs) if D.arcs else 0.0
    return DiPacking([list(c) for c in cycles], leftover, frac, attempts, engine)


def pack_hamilton_cycles(D: Digraph, config: PackerConfig | None = None, seed: int = 0) -> DiPacking:
    config = config or PackerConfig()
    best: list[list[int]] = []
    total_attempts = 0
    for restart in range(max(1, config.packing_restarts)):
        rng = stream(seed, "pack", restart)
        cycles, attempts = _greedy_pack(D, config, rng)
        total_attempts += attempts
        if len(cycles) > len(best):
            best = cycles
        if D.nu and len(best) >= min_degree(D):
            break
    return _finish(D, best, total_attempts, "heuristic")


def min_degree(D: Digraph) -> int:
    if D.nu == 0:
        return 0
    return min(min(m.bit_count() for m in D.out_masks()), min(m.bit_count() for m in D.in_masks()))


# --------------------------------------------------------------------------
# exact oracle


def hamilton_dicycles(D: Digraph) -> list[list[int]]:
    """Every directed Hamilton cycle, each listed once starting at vertex 0."""
    nu = D.nu
    if nu < 2:
        return []
    out = [sorted(b for a, b in D.arcs if a == v) for v in range(nu)]
    found: list[list[int]] = []
    path = [0]
    seen = [False] * nu
    seen[0] = True

    def dfs():
        u = path[-1]
        if len(path) == nu:
            if 0 in out[u]:
                found.append(list(path))
            return
        for v in out[u]:
            if not seen[v]:
                seen[v] = True
                path.append(v)
                dfs()
                path.pop()
                seen[v] = False

    dfs()
    return found


def exact_max_packing(D: Digraph, max_nu: int = 8, max_arcs: int = 40) -> DiPacking:
    """Maximum number of arc-disjoint Hamilton cycles, by exhaustive branch and bound.

    Every Hamilton cycle uses exactly one out-arc of vertex 0, so we branch
    over those arcs in turn: either one cycle through the arc is taken, or
    the arc stays unused.
    """
    if D.nu > max_nu or len(D.arcs) > max_arcs:
        raise CapExceeded(
            f"exact packing limited to nu <= {max_nu} and <= {max_arcs} arcs "
            f"(got nu={D.nu}, {len(D.arcs)} arcs)"
        )
    cycles = hamilton_dicycles(D)
    arc_index = {a: i for i, a in enumerate(sorted(D.arcs))}
    masks = []
    for c in cycles:
        m = 0
        for a in cycle_arcs(c):
            m |= 1 << arc_index[a]
        masks.append(m)
    first_arcs = sorted(a for a in D.arcs if a[0] == 0)
    by_first = [[i for i, c in enumerate(cycles) if c[1] == a[1]] for a in first_arcs]

    best: list[int] = []
    chosen: list[int] = []

    def rec(idx: int, used: int):
        nonlocal best
        if len(chosen) + (len(first_arcs) - idx) <= len(best):
            return
        if idx == len(first_arcs):
            best = list(chosen)
            return
        for ci in by_first[idx]:
            if masks[ci] & used == 0:
                chosen.append(ci)
                rec(idx + 1, used | masks[ci])
                chosen.pop()
        rec(idx + 1, used)

    rec(0, 0)
    return _finish(D, [cycles[i] for i in best], len(cycles), "exact")
