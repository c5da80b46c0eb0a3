"""Empirical (eps, p)-regularity audits for k-graphs.

``audit_definition1`` tests families of s distinct (k-d)-sets A_1..A_s with
|union| <= k + 2q: the number of common d-set extensions should be
(1 +- eps) n^d p^s / d!. ``audit_L_property`` tests the derived
sequence-counting properties L1..L8, which count *ordered* extensions.

Reported ratios are worst-case deviations |count / target - 1|. Cells whose
target is below 1 are reported separately and never counted as violations.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations, permutations
from typing import Callable, Sequence

from hyperpack.errors import CapExceeded, ParameterError
from hyperpack.hypergraph import KGraph, Params, count_extensions
from hyperpack.rng import stream

REJECTION_TRIES = 100
MAX_LISTED_VIOLATIONS = 1000


@dataclass
class CellSummary:
    d: int
    s: int
    target: float
    tested: int
    worst_ratio: float
    sub_unit_target: bool


@dataclass
class RegularityReport:
    mode: str
    p: float
    eps: float
    worst_ratio: float
    epsilon_hat: float
    violations: list[dict]
    n_violations: int
    samples_tested: int
    cells: list[CellSummary]
    rejection_fallbacks: int = 0
    records: list[tuple] | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("records")
        return out


def _deviation(count: int, target: float) -> float:
    return abs(count / target - 1.0)


def _enumerate_families(n: int, m: int, s: int, span: int):
    universe = list(combinations(range(1, n + 1), m))
    masks = [sum(1 << v for v in A) for A in universe]
    for idx in combinations(range(len(universe)), s):
        u = 0
        for i in idx:
            u |= masks[i]
        if u.bit_count() <= span:
            yield [universe[i] for i in idx]


def _sample_family(rng, n: int, m: int, s: int, span: int) -> tuple[list[tuple[int, ...]], bool]:
    """Uniform rejection sampling; after REJECTION_TRIES failures, draw inside a random span-sized pool.

    Returns ``(family, used_fallback)``.
    """
    for _ in range(REJECTION_TRIES):
        fam: set[tuple[int, ...]] = set()
        while len(fam) < s:
            fam.add(tuple(sorted(int(v) + 1 for v in rng.choice(n, m, replace=False))))
        if len(set().union(*fam)) <= span:
            return sorted(fam), False
    pool = sorted(int(v) + 1 for v in rng.choice(n, min(n, span), replace=False))
    fam = set()
    while len(fam) < s:
        fam.add(tuple(sorted(pool[i] for i in rng.choice(len(pool), m, replace=False))))
    return sorted(fam), True


def audit_definition1(
    H: KGraph,
    P: Params,
    p: float,
    eps: float,
    mode: str = "sampled",
    samples: int = 1000,
    seed: int = 0,
    cap: int = 10**7,
    cells: Sequence[tuple[int, int]] | None = None,
    keep_records: bool = False,
) -> RegularityReport:
    if mode not in ("exhaustive", "sampled"):
        raise ParameterError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")
    if not 0 <= p <= 1:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    if p == 0 and H.m:
        raise ParameterError("p = 0 with a non-empty graph: every target is 0 and ratios are undefined")
    n, k = H.n, H.k
    if cells is None:
        cells = [(d, s) for d in range(1, P.ell + 1) for s in range(1, 2 * P.z + 3)]
    for d, s in cells:
        if not (1 <= d <= P.ell and 1 <= s <= 2 * P.z + 2):
            raise ParameterError(f"cell (d={d}, s={s}) outside 1<=d<=ell, 1<=s<=2z+2")
    if mode == "exhaustive":
        for d, s in cells:
            size = math.comb(math.comb(n, k - d), s)
            if size > cap:
                raise CapExceeded(f"exhaustive cell (d={d}, s={s}) has {size} candidate families > cap {cap}")

    span = P.span
    summaries: list[CellSummary] = []
    violations: list[dict] = []
    n_viol = 0
    worst = 0.0
    tested_total = 0
    fallbacks = 0
    records: list[tuple] | None = [] if keep_records else None

    for d, s in cells:
        m = k - d
        target = n**d * p**s / math.factorial(d)
        sub_unit = target < 1
        if math.comb(n, m) < s:
            summaries.append(CellSummary(d, s, target, 0, 0.0, sub_unit))
            continue
        if mode == "exhaustive":
            families = _enumerate_families(n, m, s, span)
        else:
            rng = stream(seed, "def1", d, s)

            def _gen(rng=rng, m=m, s=s):
                nonlocal fallbacks
                for _ in range(samples):
                    fam, fb = _sample_family(rng, n, m, s, span)
                    fallbacks += fb
                    yield fam

            families = _gen()
        cell_worst = 0.0
        tested = 0
        for fam in families:
            count = count_extensions(H, fam, d)
            tested += 1
            if records is not None:
                records.append((d, s, tuple(fam), count))
            if target == 0:
                continue
            dev = _deviation(count, target)
            cell_worst = max(cell_worst, dev)
            if not sub_unit and dev > eps:
                n_viol += 1
                if len(violations) < MAX_LISTED_VIOLATIONS:
                    violations.append({"d": d, "s": s, "A_sets": [list(a) for a in fam], "count": count})
        tested_total += tested
        summaries.append(CellSummary(d, s, target, tested, cell_worst, sub_unit))
        if not sub_unit:
            worst = max(worst, cell_worst)

    return RegularityReport(
        mode=mode,
        p=p,
        eps=eps,
        worst_ratio=worst,
        epsilon_hat=worst,
        violations=violations,
        n_violations=n_viol,
        samples_tested=tested_total,
        cells=summaries,
        rejection_fallbacks=fallbacks,
        records=records,
    )


# --------------------------------------------------------------------------
# L1..L8: ordered-sequence properties


@dataclass(frozen=True)
class LPattern:
    property_id: str
    seq_len: int
    d: int
    s: int
    target_power_n: int
    build: Callable[[Sequence[int]], list[tuple[int, ...]]]
    all_distinct: bool = True


def l_pattern(P: Params, property_id: str) -> LPattern:
    """The extension pattern of an L-property: which A-sets a vertex sequence defines."""
    k, ell, q, z = P.k, P.ell, P.q, P.z
    m = k - 2 * ell
    pid = property_id.upper()
    if pid in ("L6", "L8") and k % ell == 0:
        raise ParameterError(f"{pid} needs ell not dividing k (otherwise q - k + ell = 0)")
    if pid in ("L5", "L7") and k % ell != 0:
        raise ParameterError(f"{pid} is only well-formed when ell divides k (q = k - ell)")

    def srt(xs):
        return tuple(sorted(xs))

    if pid == "L1":
        return LPattern(pid, q, k - q, 1, k - q, lambda x: [srt(x)])
    if pid == "L2":
        return LPattern(pid, k - ell, ell, 1, ell, lambda x: [srt(x)])
    if pid == "L3":
        return LPattern(pid, 2 * q, k - q, 2, k - q, lambda x: [srt(x[:q]), srt(x[q:])])
    if pid == "L4":
        h = k - ell
        return LPattern(pid, 2 * h, ell, 2, ell, lambda x: [srt(x[:h]), srt(x[h:])], all_distinct=False)
    if pid == "L5":

        def b5(x):
            xs, a, zz = x[:ell], x[ell : ell + m], x[ell + m :]
            return [srt(xs + a)] + [srt(a[i * ell :] + zz[: (i + 1) * ell]) for i in range(z)]

        return LPattern(pid, ell + m + q, ell, z + 1, ell, b5)
    if pid == "L6":
        dd = q - k + ell

        def b6(x):
            a, zz = x[: k - ell], x[k - ell :]
            return [srt(a[i * ell :] + zz[: k - q + i * ell]) for i in range(z)]

        return LPattern(pid, k - ell + q, dd, z, dd, b6)
    if pid == "L7":

        def b7(x):
            xs, ys = x[:ell], x[ell : 2 * ell]
            a = x[2 * ell : 2 * ell + m]
            zz = x[2 * ell + m : 2 * ell + m + q]
            ww = x[2 * ell + m + q :]
            fam = [srt(xs + a), srt(ys + a)]
            fam += [srt(a[i * ell :] + zz[: (i + 1) * ell]) for i in range(z)]
            fam += [srt(a[i * ell :] + ww[: (i + 1) * ell]) for i in range(z)]
            return fam

        return LPattern(pid, 2 * ell + m + 2 * q, ell, 2 * z + 2, ell, b7)
    if pid == "L8":
        dd = q - k + ell

        def b8(x):
            a, zz, ww = x[: k - ell], x[k - ell : k - ell + q], x[k - ell + q :]
            fam = [srt(a[i * ell :] + zz[: k - q + i * ell]) for i in range(z)]
            fam += [srt(a[i * ell :] + ww[: k - q + i * ell]) for i in range(z)]
            return fam

        return LPattern(pid, k - ell + 2 * q, dd, 2 * z, dd, b8)
    raise ParameterError(f"unknown property {property_id!r}; expected L1..L8")


def l_property_count(H: KGraph, pattern: LPattern, seq: Sequence[int]) -> int:
    """Number of ordered extension sequences for the configuration ``seq``."""
    fam = pattern.build(tuple(seq))
    return count_extensions(H, fam, pattern.d) * math.factorial(pattern.d)


def _valid_l4(seq: Sequence[int], h: int) -> bool:
    x, y = seq[:h], seq[h:]
    return x[0] != y[0] and set(x) != set(y)


@dataclass
class LPropertyReport:
    property_id: str
    mode: str
    target: float
    tested_configs: int
    worst_ratio: float
    sub_unit_target: bool


def audit_L_property(
    H: KGraph,
    P: Params,
    p: float,
    property_id: str,
    mode: str = "sampled",
    samples: int = 1000,
    seed: int = 0,
    cap: int = 10**7,
) -> LPropertyReport:
    pat = l_pattern(P, property_id)
    n = H.n
    L = pat.seq_len
    target = float(n**pat.target_power_n) * p**pat.s
    h = P.k - P.ell
    if pat.all_distinct and L > n:
        raise ParameterError(f"{pat.property_id} needs {L} distinct vertices, n={n}")

    if mode == "exhaustive":
        size = math.perm(n, L) if pat.all_distinct else math.perm(n, h) ** 2
        if size > cap:
            raise CapExceeded(f"{pat.property_id}: {size} sequences > cap {cap}")
        if pat.all_distinct:
            configs = permutations(range(1, n + 1), L)
        else:
            configs = (
                x + y
                for x in permutations(range(1, n + 1), h)
                for y in permutations(range(1, n + 1), h)
                if _valid_l4(x + y, h)
            )
    elif mode == "sampled":
        rng = stream(seed, "lprop", pat.property_id)

        def _gen():
            done = 0
            while done < samples:
                if pat.all_distinct:
                    seq = tuple(int(v) + 1 for v in rng.choice(n, L, replace=False))
                else:
                    seq = tuple(int(v) + 1 for v in rng.choice(n, h, replace=False)) + tuple(
                        int(v) + 1 for v in rng.choice(n, h, replace=False)
                    )
                    if not _valid_l4(seq, h):
                        continue
                done += 1
                yield seq

        configs = _gen()
    else:
        raise ParameterError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")

    worst = 0.0
    tested = 0
    for seq in configs:
        count = l_property_count(H, pat, seq)
        tested += 1
        if target > 0:
            worst = max(worst, _deviation(count, target))
        elif count:
            worst = math.inf
    return LPropertyReport(pat.property_id, mode, target, tested, worst, target < 1)
