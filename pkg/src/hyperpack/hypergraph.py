"""k-uniform hypergraphs on the vertex set [n] = {1, ..., n}.

Edges are stored canonically as sorted tuples of vertex ids. Extension
counting (how many d-sets D complete every A_i to an edge) is the primitive
behind all regularity audits, so each graph lazily builds a "link" index per
d: (k-d)-set -> its completions. For d = 1 the completions are an int
bitmask over vertices, which turns the intersection into a few ANDs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from hyperpack.errors import ParameterError
from hyperpack.rng import stream

Edge = tuple[int, ...]


@dataclass(frozen=True)
class Params:
    k: int
    ell: int
    z: int
    q: int
    n: int
    nu_q: int
    nu_ell: int

    @property
    def span(self) -> int:
        """Largest union size allowed for an extension family (k + 2q)."""
        return self.k + 2 * self.q


def derive_params(k: int, ell: int, n: int, *, check_divisibility: bool = True) -> Params:
    """Derive z = ceil((k-ell)/ell) and q = ell*z, validating the regime ell < k/2.

    With ``check_divisibility`` (the default) n must be a multiple of q; a
    warning is issued when it is not also a multiple of 2q.
    """
    if k < 3:
        raise ParameterError(f"k must be >= 3, got {k}")
    if ell < 1:
        raise ParameterError(f"ell must be >= 1, got {ell}")
    if 2 * ell >= k:
        raise ParameterError(f"ell must satisfy ell < k/2, got ell={ell}, k={k}")
    if n < k:
        raise ParameterError(f"n must be >= k, got n={n}, k={k}")
    z = -(-(k - ell) // ell)
    q = ell * z
    # k/2 < k - ell <= q < k
    assert z >= 2 and 2 * (k - ell) > k and k - ell <= q < k, (k, ell, z, q)
    if check_divisibility:
        if n % q:
            raise ParameterError(
                f"n={n} is not divisible by q={q}; digraph construction needs q | n "
                f"(and packing guarantees assume 2q={2 * q} | n)"
            )
        if n % (2 * q):
            warnings.warn(f"n={n} is divisible by q={q} but not by 2q={2 * q}", stacklevel=2)
    return Params(k=k, ell=ell, z=z, q=q, n=n, nu_q=n // q, nu_ell=n // ell)


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class KGraph:
    n: int
    k: int
    edges: frozenset[Edge]
    _links: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.k < 1 or self.n < 0:
            raise ParameterError(f"bad dimensions n={self.n}, k={self.k}")
        canon = frozenset(tuple(sorted(e)) for e in self.edges)
        for e in canon:
            if len(e) != self.k or len(set(e)) != self.k:
                raise ParameterError(f"edge {e} does not have {self.k} distinct vertices")
            if e[0] < 1 or e[-1] > self.n:
                raise ParameterError(f"edge {e} has a vertex outside [1..{self.n}]")
        if len(canon) != len(self.edges):
            raise ParameterError("duplicate edges (after canonical sorting)")
        object.__setattr__(self, "edges", canon)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def link(self, d: int) -> dict:
        """(k-d)-tuple -> completions; bitmask for d == 1, set of d-tuples otherwise."""
        cached = self._links.get(d)
        if cached is not None:
            return cached
        index: dict = {}
        for e in self.edges:
            for D in combinations(e, d):
                A = tuple(v for v in e if v not in D)
                if d == 1:
                    index[A] = index.get(A, 0) | (1 << D[0])
                else:
                    index.setdefault(A, set()).add(D)
        self._links[d] = index
        return index


def complete_kgraph(n: int, k: int) -> KGraph:
    return KGraph(n, k, frozenset(combinations(range(1, n + 1), k)))


def generate_random_kgraph(n: int, k: int, p: float, seed: int) -> KGraph:
    """Binomial random k-graph: each k-subset of [n] kept independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if k < 1 or n < k:
        raise ParameterError(f"need 1 <= k <= n, got n={n}, k={k}")
    total = math.comb(n, k)
    draws = stream(seed, "kgraph", n, k).random(total)
    keep = draws < p
    edges = frozenset(e for e, kept in zip(combinations(range(1, n + 1), k), keep) if kept)
    return KGraph(n, k, edges)


def count_extensions(H: KGraph, A_sets: Sequence[Iterable[int]], d: int) -> int:
    """Number of d-sets D with A_i | D an edge of H for every i.

    Such a D is automatically disjoint from every A_i, since |A_i | D| must be k.
    """
    if not 1 <= d < H.k:
        raise ParameterError(f"d must satisfy 1 <= d < k, got d={d}, k={H.k}")
    keys = []
    for A in A_sets:
        key = tuple(sorted(A))
        if len(key) != H.k - d or len(set(key)) != len(key):
            raise ParameterError(f"A-set {key} must have {H.k - d} distinct vertices")
        keys.append(key)
    if not keys:
        raise ParameterError("need at least one A-set")
    index = H.link(d)
    if d == 1:
        acc = -1
        for key in keys:
            acc &= index.get(key, 0)
            if not acc:
                return 0
        return acc.bit_count()
    sets = sorted((index.get(key, set()) for key in keys), key=len)
    common = set(sets[0])
    for s in sets[1:]:
        common &= s
        if not common:
            return 0
    return len(common)


def remove_edges(H: KGraph, F: Iterable[Sequence[int]]) -> KGraph:
    F = frozenset(tuple(sorted(e)) for e in F)
    missing = F - H.edges
    if missing:
        raise ParameterError(f"{len(missing)} edges to remove are not in H, e.g. {min(missing)}")
    return KGraph(H.n, H.k, H.edges - F)


def read_kgraph(path) -> KGraph:
    """Parse the text format: header ``n k m`` then m lines of k vertex ids; ``#`` lines ignored."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(tok) for tok in line.split()])
    if not rows or len(rows[0]) != 3:
        raise ParameterError(f"{path}: missing 'n k m' header")
    n, k, m = rows[0]
    body = rows[1:]
    if len(body) != m:
        raise ParameterError(f"{path}: header declares {m} edges, found {len(body)}")
    return KGraph(n, k, frozenset(tuple(sorted(r)) for r in body))


def write_kgraph(H: KGraph, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"{H.n} {H.k} {H.m}\n")
        for e in H.sorted_edges():
            fh.write(" ".join(map(str, e)) + "\n")
