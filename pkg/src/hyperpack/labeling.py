"""Randomized edge labeling over r permutation digraphs.

Steps: draw r independent permutations and their shift digraphs D_i; H_i is
the set of edges owned by D_i; every edge e gets I_e = {i : e in H_i} and, if
I_e is non-empty, a uniform label from I_e; D'_i keeps exactly the arcs
whose z owned edges all carry label i, and H'_i collects their edges.
Digraph indices are 0-based.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from hyperpack.errors import CapExceeded, ParameterError, ValidationError
from hyperpack.hypergraph import Edge, KGraph, Params, remove_edges
from hyperpack.reduction import ShiftDigraph, build_digraph
from hyperpack.rng import stream


@dataclass(frozen=True)
class ProcedureParams:
    kappa: float
    r: int
    kappa_mode: str
    r_mode: str
    kappa_raw: float | None = None
    r_raw: float | None = None
    rounding: str = "kappa: nearest integer >= 1; r: ceiling, >= 1"


def compute_procedure_params(
    P: Params,
    n: int,
    p: float,
    eps: float,
    kappa: float | None = None,
    r: int | None = None,
    r_budget: int = 10**6,
) -> ProcedureParams:
    """kappa = 6(k+1) ln(n) / eps^2 and r = ell q n^(k-2) kappa / (k! p^(z-1)), unless overridden."""
    if eps <= 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    if not 0 < p <= 1:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    k = P.k
    kappa_raw = 6 * (k + 1) * math.log(n) / eps**2
    r_raw = P.ell * P.q * n ** (k - 2) / (math.factorial(k) * p ** (P.z - 1)) * kappa_raw
    if kappa is None:
        kappa_val, kappa_mode = float(max(1, round(kappa_raw))), "formula"
    else:
        if kappa <= 0:
            raise ParameterError(f"kappa override must be > 0, got {kappa}")
        kappa_val, kappa_mode = float(kappa), "override"
    if r is None:
        r_val = max(1, math.ceil(r_raw))
        if r_val > r_budget:
            raise CapExceeded(f"formula r = {r_raw:.6g} exceeds budget {r_budget}; pass an explicit r override")
        r_mode = "formula"
    else:
        if r < 0:
            raise ParameterError(f"r override must be >= 0, got {r}")
        r_val, r_mode = int(r), "override"
    return ProcedureParams(kappa_val, r_val, kappa_mode, r_mode, kappa_raw, r_raw)


def edge_coverage_probability(P: Params, n: int, p: float, eps: float = 0.0) -> tuple[float, float, float]:
    """Leading-order probability that a fixed edge is owned in one digraph,
    k! p^(z-1) / (ell q n^(k-2)), with its (1 +- z eps) band as (low, mid, high)."""
    mid = math.factorial(P.k) * p ** (P.z - 1) / (P.ell * P.q * n ** (P.k - 2))
    return mid * (1 - P.z * eps), mid, mid * (1 + P.z * eps)


def complete_graph_coverage_probability(P: Params) -> float:
    """Exact per-digraph ownership probability of an edge of the complete k-graph.

    z windows x k! orderings x (n-k)!/(n-2q)! completions, each pair of
    ordered q-tuples being two blocks of sigma with probability
    nu(nu-1) (n-2q)!/n!.
    """
    n, nu = P.n, P.nu_q
    if nu < 2:
        return 0.0
    return P.z * math.factorial(P.k) * nu * (nu - 1) * math.factorial(n - P.k) / math.factorial(n)


@dataclass
class LabelState:
    coverage: dict[Edge, list[int]]
    labels: dict[Edge, int]


@dataclass
class ProcedureOutput:
    params: ProcedureParams
    seed: int
    digraphs: list[ShiftDigraph]
    filtered: list[ShiftDigraph]
    packed_graphs: list[frozenset[Edge]]
    residual: KGraph
    state: LabelState
    streamed: bool = False
    n_edges: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return self.params.r

    def accounting(self) -> dict:
        packed = sum(len(h) for h in self.packed_graphs)
        unlabeled = sum(1 for ix in self.state.coverage.values() if not ix)
        return {
            "edges_H": self.n_edges,
            "edges_residual": self.residual.m,
            "edges_packed_graphs": packed,
            "edges_unlabeled": unlabeled,
            "identity_holds": self.n_edges == self.residual.m + packed,
        }


def random_permutation(seed: int, n: int, i: int) -> list[int]:
    return [int(v) + 1 for v in stream(seed, "perm", i).permutation(n)]


def _label_edge(seed: int, idx: int, choices: Sequence[int]) -> int:
    return choices[int(stream(seed, "label", idx).integers(len(choices)))]


def run_procedure1(
    H: KGraph,
    P: Params,
    PP: ProcedureParams,
    seed: int,
    low_memory: bool = False,
    memory_budget: int = 5 * 10**7,
) -> ProcedureOutput:
    """Run the labeling procedure on H; all randomness is keyed on ``seed``.

    Permutation i comes from stream ("perm", i) and the label of the j-th
    edge in sorted order from stream ("label", j), so results do not depend
    on evaluation order. In streamed mode (``low_memory`` or
    r * nu_q^2 > ``memory_budget``) digraphs are rebuilt in a second pass
    instead of being kept.
    """
    if P.n % P.q:
        raise ParameterError(f"n={P.n} is not divisible by q={P.q}")
    r = PP.r
    streamed = low_memory or r * P.nu_q**2 > memory_budget

    def digraph(i: int) -> ShiftDigraph:
        return build_digraph(H, random_permutation(seed, P.n, i), P)

    edges = H.sorted_edges()
    coverage: dict[Edge, list[int]] = {e: [] for e in edges}
    digraphs: list[ShiftDigraph] = []
    for i in range(r):
        D = digraph(i)
        for e in D.edge_owner:
            coverage[e].append(i)
        if not streamed:
            digraphs.append(D)

    labels: dict[Edge, int] = {}
    for idx, e in enumerate(edges):
        if coverage[e]:
            labels[e] = _label_edge(seed, idx, coverage[e])

    filtered: list[ShiftDigraph] = []
    packed: list[frozenset[Edge]] = []
    for i in range(r):
        D = digraphs[i] if not streamed else digraph(i)
        keep = [a for a, es in D.owned.items() if all(labels[e] == i for e in es)]
        Dp = D.restrict(keep)
        filtered.append(Dp)
        packed.append(frozenset(Dp.edge_owner))

    union: set[Edge] = set()
    for h in packed:
        if union & h:
            raise ValidationError("packed graphs H'_i are not pairwise disjoint")
        union |= h
    residual = remove_edges(H, union)
    out = ProcedureOutput(
        PP, seed, digraphs, filtered, packed, residual, LabelState(coverage, labels), streamed, H.m
    )
    if not out.accounting()["identity_holds"]:
        raise ValidationError("edge accounting identity violated")
    return out


def coverage_histogram(out: ProcedureOutput, P: Params | None = None, p: float | None = None) -> dict:
    """Histogram of |I_e| over the edges of H, its mean, and (given P, p) the theoretical r * p1."""
    counts = [len(ix) for ix in out.state.coverage.values()]
    hist = dict(sorted(Counter(counts).items()))
    mean = sum(counts) / len(counts) if counts else 0.0
    report = {"histogram": hist, "mean": mean, "edges": len(counts), "r": out.r}
    if P is not None and p is not None:
        report["target_r_p1"] = out.r * edge_coverage_probability(P, P.n, p)[1]
    return report


def partner_edges(e: Sequence[int], D: ShiftDigraph) -> set[Edge] | None:
    e = tuple(sorted(e))
    arc = D.edge_owner.get(e)
    if arc is None:
        return None
    return set(D.owned[arc]) - {e}


def condensed_count(S: Iterable[int], digraphs: Sequence[ShiftDigraph], H: KGraph | None = None) -> int:
    """Number of digraphs in which S = e1 | e2 for two distinct edges owned by one arc.

    Owned edge sets of distinct arcs are disjoint, so phi_i(e1) and
    phi_i(e2) intersect exactly when e1 and e2 share an owning arc.
    """
    S = tuple(sorted(set(S)))
    if not digraphs:
        return 0
    P = digraphs[0].params
    t = len(S) - P.k
    if not 1 <= t <= 2 * P.q - P.k:
        raise ParameterError(f"|S| = {len(S)} must be k + t with 1 <= t <= 2q - k = {2 * P.q - P.k}")
    subsets = [e for e in combinations(S, P.k) if H is None or e in H.edges]
    pairs = [(a, b) for a, b in combinations(subsets, 2) if len(set(a) | set(b)) == len(S)]
    total = 0
    for D in digraphs:
        for a, b in pairs:
            ua = D.edge_owner.get(a)
            if ua is not None and ua == D.edge_owner.get(b):
                total += 1
                break
    return total
