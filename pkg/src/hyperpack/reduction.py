"""Permutation-shift digraphs and lifting of their Hamilton cycles.

A permutation sigma of [n] is cut into nu_q consecutive q-blocks. Block v1
precedes block v2 when the z windows of k consecutive positions in the
concatenation v1.v2, shifted by ell each time, are all edges of H; the arc
(v1, v2) then owns those z edges. Distinct arcs own disjoint edge sets, so
arc-disjoint Hamilton cycles of the digraph lift to edge-disjoint type-ell
Hamilton cycles of H.

Digraph vertices (blocks) are addressed by 0-based block index; hypergraph
vertices keep their 1-based ids.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from hyperpack.errors import ParameterError, ValidationError
from hyperpack.hypergraph import Edge, KGraph, Params

Arc = tuple[int, int]


def window_edges(v1: Sequence[int], v2: Sequence[int], P: Params) -> list[Edge]:
    if len(v1) != P.q or len(v2) != P.q:
        raise ParameterError(f"q-tuples must have length {P.q}")
    w = tuple(v1) + tuple(v2)
    if len(set(w)) != 2 * P.q:
        raise ParameterError(f"q-tuples {tuple(v1)} and {tuple(v2)} overlap or repeat vertices")
    return [tuple(sorted(w[i * P.ell : i * P.ell + P.k])) for i in range(P.z)]


def precedes(H: KGraph, v1: Sequence[int], v2: Sequence[int], P: Params) -> bool:
    return all(e in H.edges for e in window_edges(v1, v2, P))


@dataclass(frozen=True)
class ShiftDigraph:
    params: Params
    sigma: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    owned: dict[Arc, tuple[Edge, ...]]
    edge_owner: dict[Edge, Arc] = field(repr=False, compare=False)

    @property
    def nu(self) -> int:
        return len(self.blocks)

    @property
    def arcs(self) -> list[Arc]:
        return sorted(self.owned)

    def edges(self) -> set[Edge]:
        """All hyperedges owned by some arc (the k-graph H_sigma)."""
        return set(self.edge_owner)

    def restrict(self, keep: Iterable[Arc]) -> "ShiftDigraph":
        owned = {a: self.owned[a] for a in keep}
        owner = {e: a for a, es in owned.items() for e in es}
        return ShiftDigraph(self.params, self.sigma, self.blocks, owned, owner)


def blocks_of(sigma: Sequence[int], q: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sigma[i : i + q]) for i in range(0, len(sigma), q))


def build_digraph(H: KGraph, sigma: Sequence[int], P: Params) -> ShiftDigraph:
    n = P.n
    sigma = tuple(int(v) for v in sigma)
    if H.n != n or H.k != P.k:
        raise ParameterError(f"graph (n={H.n}, k={H.k}) does not match params (n={n}, k={P.k})")
    if sorted(sigma) != list(range(1, n + 1)):
        raise ParameterError("sigma must be a permutation of 1..n")
    if n % P.q:
        raise ParameterError(f"n={n} is not divisible by q={P.q}")
    if n % (2 * P.q):
        warnings.warn(f"n={n} is not divisible by 2q={2 * P.q}", stacklevel=2)
    blocks = blocks_of(sigma, P.q)
    edges = H.edges
    owned: dict[Arc, tuple[Edge, ...]] = {}
    owner: dict[Edge, Arc] = {}
    for i, b1 in enumerate(blocks):
        for j, b2 in enumerate(blocks):
            if i == j:
                continue
            ws = window_edges(b1, b2, P)
            if all(e in edges for e in ws):
                owned[(i, j)] = tuple(ws)
                for e in ws:
                    owner[e] = (i, j)
    return ShiftDigraph(P, sigma, blocks, owned, owner)


def check_ownership_partition(D: ShiftDigraph) -> bool:
    """True iff every arc owns exactly z distinct edges and no edge has two owners."""
    seen: set[Edge] = set()
    for es in D.owned.values():
        if len(set(es)) != D.params.z:
            return False
        for e in es:
            if e in seen:
                return False
            seen.add(e)
    return True


@dataclass(frozen=True)
class TypeLCycle:
    edge_sequence: tuple[Edge, ...]
    vertex_order: tuple[int, ...]


def lift_cycle(D: ShiftDigraph, dicycle: Sequence[int]) -> TypeLCycle:
    """Lift a Hamilton cycle of D (block indices) to a type-ell Hamilton cycle of H.

    Edge j of the result is positions j*ell .. j*ell+k-1 of the concatenated
    blocks, read cyclically, for j = 0 .. nu_ell-1.
    """
    P = D.params
    cyc = list(dicycle)
    if len(cyc) != D.nu or sorted(cyc) != list(range(D.nu)):
        raise ValidationError(f"dicycle must visit each of the {D.nu} blocks exactly once")
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if (a, b) not in D.owned:
            raise ValidationError(f"dicycle uses missing arc ({a}, {b})")
    w = [v for i in cyc for v in D.blocks[i]]
    n = len(w)
    nu_ell = D.nu * P.z
    seq = tuple(
        tuple(sorted(w[(j * P.ell + t) % n] for t in range(P.k))) for j in range(nu_ell)
    )
    for j, e in enumerate(seq):
        arc = (cyc[j // P.z], cyc[(j // P.z + 1) % D.nu])
        if D.edge_owner.get(e) != arc:
            raise ValidationError(f"lifted edge {j} {e} is not owned by arc {arc}")
    return TypeLCycle(seq, tuple(w))


def validate_type_l_cycle(H: KGraph, C: TypeLCycle, P: Params) -> tuple[bool, str | None]:
    """Check (a) edges distinct and in H, (b) |f_{i+1} minus f_i| = ell cyclically,
    (c) the differences cover V; finally that edges are k-windows of vertex_order.

    Returns ``(ok, diagnostic)`` where the diagnostic names the first failing clause.
    """
    n = H.n
    if n % P.ell:
        raise ParameterError(f"ell={P.ell} does not divide n={n}")
    seq = [tuple(sorted(e)) for e in C.edge_sequence]
    nu_ell = n // P.ell
    if len(seq) != nu_ell:
        return False, f"clause (a): {len(seq)} edges, expected {nu_ell}"
    if len(set(seq)) != len(seq):
        return False, "clause (a): repeated edge"
    for i, e in enumerate(seq):
        if e not in H.edges:
            return False, f"clause (a): edge {i} {e} not in H"
    covered: set[int] = set()
    for i, e in enumerate(seq):
        g = set(seq[(i + 1) % nu_ell]) - set(e)
        if len(g) != P.ell:
            return False, f"clause (b): |f_{i + 1} - f_{i}| = {len(g)} at index {i}"
        covered |= g
    if covered != set(range(1, n + 1)):
        return False, f"clause (c): {n - len(covered & set(range(1, n + 1)))} vertices uncovered"
    w = C.vertex_order
    if sorted(w) != list(range(1, n + 1)):
        return False, "vertex_order is not a permutation of V"
    for i, e in enumerate(seq):
        if tuple(sorted(w[(i * P.ell + t) % n] for t in range(P.k))) != e:
            return False, f"edge {i} is not the k-window at position {i * P.ell} of vertex_order"
    return True, None


def write_digraph_dump(D: ShiftDigraph, path, comment: str | None = None) -> None:
    """Header ``nu_q q``; nu_q lines of block vertices; then ``i j | e_0 | ... | e_{z-1}`` per arc."""
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"{D.nu} {D.params.q}\n")
        for b in D.blocks:
            fh.write(" ".join(map(str, b)) + "\n")
        for a in D.arcs:
            parts = [f"{a[0]} {a[1]}"] + [" ".join(map(str, e)) for e in D.owned[a]]
            fh.write(" | ".join(parts) + "\n")


def read_digraph_dump(path) -> tuple[int, int, list[tuple[int, ...]], dict[Arc, tuple[Edge, ...]]]:
    """Returns ``(nu, q, blocks, owned)``."""
    lines = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                lines.append(line)
    if not lines:
        raise ParameterError(f"{path}: empty digraph dump")
    head = lines[0].split()
    if len(head) != 2:
        raise ParameterError(f"{path}: missing 'nu_q q' header")
    nu, q = int(head[0]), int(head[1])
    blocks = [tuple(int(t) for t in ln.split()) for ln in lines[1 : 1 + nu]]
    if len(blocks) != nu or any(len(b) != q for b in blocks):
        raise ParameterError(f"{path}: expected {nu} block lines of {q} vertices")
    owned: dict[Arc, tuple[Edge, ...]] = {}
    for ln in lines[1 + nu :]:
        parts = [p.split() for p in ln.split("|")]
        i, j = (int(t) for t in parts[0])
        owned[(i, j)] = tuple(tuple(sorted(int(t) for t in p)) for p in parts[1:])
    return nu, q, blocks, owned
