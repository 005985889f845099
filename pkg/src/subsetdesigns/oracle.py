"""Ground truth by exhaustive enumeration and by dynamic programming.

Nothing in this module consults the closed-form counts or the design
theorems.  Two independent routes are offered:

* bitmask enumeration of every subset of a point set, vectorised with numpy
  in chunks of ``2**CHUNK_BITS`` masks (``subset_census``, ``coverage_census``)
  plus explicit block listing (``enumerate_blocks``, ``check_t_design``);
* a dynamic program over the points with state (subset size, partial sum),
  in exact Python integers (``dp_counts``, ``dp_replication``).

Budgets are explicit; exceeding one raises :class:`ResourceError` rather than
silently truncating.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .groups import (
    GroupElement,
    GroupSpec,
    _check,
    addition_table,
    all_groups_of_order,
    e_of,
    eclass_representatives,
    element_index,
    enumerate_elements,
    index_to_coords,
    prime_factors,
)

SUBSET_BUDGET = 10**8
MASK_BUDGET = 2**32
DP_BUDGET = 10**8
CHUNK_BITS = 20


@dataclass(frozen=True)
class IncidenceInstance:
    group: GroupSpec
    star: bool
    k: int
    x: GroupElement
    points: tuple[GroupElement, ...]
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise DomainError("points are not distinct")
        if len(set(self.blocks)) != len(self.blocks):
            raise DomainError("blocks are not distinct")
        for b in self.blocks:
            if len(b) != self.k or list(b) != sorted(set(b)):
                raise DomainError(f"block {b} is not a sorted {self.k}-subset")

    @property
    def v(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class DesignCheckReport:
    t: int
    is_t_design: bool
    lam: int | None = None
    counterexample: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    flag: str | None = None
    blocks: int | None = None
    coverage: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.is_t_design and self.lam is None:
            raise DomainError("a positive report carries lambda")
        if not self.is_t_design and self.lam is not None:
            raise DomainError("a negative report carries no lambda")


def point_indices(G: GroupSpec, star: bool) -> list[int]:
    """Element indices of the point set: all of ``G``, or ``G`` minus the identity."""
    return list(range(1 if star else 0, G.order))


def _table(G: GroupSpec) -> np.ndarray:
    return addition_table(G).astype(np.int32)


def _negation(G: GroupSpec, table: np.ndarray) -> np.ndarray:
    return np.argmin(table, axis=1).astype(np.int32)  # the column holding index 0


def subset_census(
    table: np.ndarray, points: Sequence[int], mask_budget: int = MASK_BUDGET
) -> np.ndarray:
    """``H[j, s]`` = number of subsets of ``points`` with ``j`` elements summing to ``s``.

    Every one of the ``2**len(points)`` subsets is visited.
    """
    n = table.shape[0]
    m = len(points)
    if 2**m > mask_budget:
        raise ResourceError(f"2**{m} subsets exceed the mask budget {mask_budget}")
    low_bits = min(m, CHUNK_BITS)
    sums = np.zeros(1, dtype=np.int32)
    pops = np.zeros(1, dtype=np.int32)
    for p in points[:low_bits]:
        sums = np.concatenate([sums, table[sums, p]])
        pops = np.concatenate([pops, pops + 1])
    hist = np.zeros((m + 1) * n, dtype=np.int64)
    high = list(points[low_bits:])
    base = pops * n
    for mask in range(2 ** len(high)):
        hsum = 0
        hpop = 0
        for bit, p in enumerate(high):
            if mask >> bit & 1:
                hsum = table[hsum, p]
                hpop += 1
        keys = base + (hpop * n) + table[sums, hsum]
        hist += np.bincount(keys, minlength=(m + 1) * n)
    return hist.reshape(m + 1, n)


def census_counts(G: GroupSpec, star: bool = False) -> np.ndarray:
    """Brute-force ``b_k^x`` (or the star variant) for every ``k`` and every ``x`` index."""
    table = _table(G)
    return subset_census(table, point_indices(G, star))


def coverage_census(
    G: GroupSpec, t: int, star: bool = False, mask_budget: int = SUBSET_BUDGET
) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Coverage of every t-subset of points by every block family.

    Returns ``(tsubsets, cov)`` where ``cov[i, k, x]`` counts k-subsets of the
    point set summing to element index ``x`` that contain ``tsubsets[i]``.
    """
    pts = point_indices(G, star)
    v = len(pts)
    if t < 1 or t > v:
        raise DomainError(f"t={t} outside 1..{v}")
    visits = comb(v, t) * 2 ** (v - t)
    if visits > mask_budget:
        raise ResourceError(f"{visits} subset visits exceed the budget {mask_budget}")
    table = _table(G)
    neg = _negation(G, table)
    n = G.order
    tsubsets = list(combinations(pts, t))
    cov = np.zeros((len(tsubsets), v + 1, n), dtype=np.int64)
    for i, T in enumerate(tsubsets):
        rest = [p for p in pts if p not in T]
        H = subset_census(table, rest, mask_budget=mask_budget)
        s = 0
        for p in T:
            s = table[s, p]
        # blocks of size k summing to x that contain T <-> (k-t)-subsets of rest summing to x - s
        shift = table[:, neg[s]]
        cov[i, t:, :] = H[:, shift]
    return tsubsets, cov


def design_from_coverage(
    tsubsets: list[tuple[int, ...]], column: np.ndarray, blocks: int, t: int
) -> DesignCheckReport:
    """Decide a design from the coverage counts of every t-subset."""
    if blocks == 0:
        return DesignCheckReport(t, False, flag="empty-family", blocks=0)
    first = int(column[0])
    bad = np.nonzero(column != first)[0]
    if len(bad) == 0:
        return DesignCheckReport(t, True, lam=first, blocks=blocks)
    j = int(bad[0])
    return DesignCheckReport(
        t,
        False,
        counterexample=(tsubsets[0], tsubsets[j]),
        blocks=blocks,
        coverage=(first, int(column[j])),
    )


def enumerate_blocks(
    G: GroupSpec, k: int, x: GroupElement, star: bool = False, budget: int = SUBSET_BUDGET
) -> IncidenceInstance:
    """Explicit list of the k-subsets of the point set summing to ``x``.

    Blocks are tuples of positions into ``instance.points`` in lexicographic order.
    """
    _check(G, x)
    pts = point_indices(G, star)
    v = len(pts)
    if not 0 <= k <= v:
        raise DomainError(f"k={k} outside 0..{v}")
    if comb(v, k) > budget:
        raise ResourceError(
            f"C({v},{k}) = {comb(v, k)} subsets exceed the budget {budget}; use dp_replication"
        )
    table = addition_table(G).tolist()
    target = element_index(G, x)
    blocks = []
    for combo in combinations(range(v), k):
        s = 0
        for i in combo:
            s = table[s][pts[i]]
        if s == target:
            blocks.append(combo)
    points = tuple(GroupElement(G, index_to_coords(G, p)) for p in pts)
    return IncidenceInstance(G, star, k, x, points, tuple(blocks))


def check_t_design(inst: IncidenceInstance, t: int, budget: int = SUBSET_BUDGET) -> DesignCheckReport:
    """Count how many blocks contain each t-subset of points and compare."""
    return check_blocks(inst.v, inst.k, inst.blocks, t, budget)


def check_blocks(
    v: int, k: int, blocks: Sequence[tuple[int, ...]], t: int, budget: int = SUBSET_BUDGET
) -> DesignCheckReport:
    """t-design test for an explicit block list over points ``0..v-1``."""
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    if not blocks:
        return DesignCheckReport(t, False, flag="empty-family", blocks=0)
    if t > k:
        raise DomainError(f"t={t} exceeds block size {k}")
    if comb(v, t) > budget or len(blocks) * comb(k, t) > budget:
        raise ResourceError(f"coverage count for t={t} on {v} points exceeds the budget {budget}")
    cover: Counter[tuple[int, ...]] = Counter()
    for b in blocks:
        cover.update(combinations(b, t))
    first_T = None
    first_c = None
    for T in combinations(range(v), t):
        c = cover.get(T, 0)
        if first_T is None:
            first_T, first_c = T, c
        elif c != first_c:
            return DesignCheckReport(
                t, False, counterexample=(first_T, T), blocks=len(blocks), coverage=(first_c, c)
            )
    return DesignCheckReport(t, True, lam=first_c, blocks=len(blocks))


def dp_counts(
    table: Sequence[Sequence[int]], points: Sequence[int], kmax: int, budget: int = DP_BUDGET
) -> list[list[int]]:
    """``C[j][s]`` = number of j-subsets (j <= kmax) of ``points`` summing to ``s``.

    Dynamic program over the points in order; exact integers throughout.
    """
    n = len(table)
    kmax = min(kmax, len(points))
    if len(points) * (kmax + 1) * n > budget:
        raise ResourceError(
            f"DP table work {len(points) * (kmax + 1) * n} exceeds the budget {budget}"
        )
    C = [[0] * n for _ in range(kmax + 1)]
    C[0][0] = 1
    for done, p in enumerate(points):
        row_p = [table[s][p] for s in range(n)]
        for j in range(min(done + 1, kmax), 0, -1):
            src = C[j - 1]
            dst = C[j]
            for s in range(n):
                c = src[s]
                if c:
                    dst[row_p[s]] += c
    return C


def dp_replication(
    G: GroupSpec,
    k: int,
    x: GroupElement,
    y: GroupElement,
    star: bool = False,
    budget: int = DP_BUDGET,
) -> int:
    """Number of k-subsets of the point set that contain ``y`` and sum to ``x``."""
    _check(G, x, y)
    pts = point_indices(G, star)
    yi = element_index(G, y)
    if yi not in pts:
        raise DomainError(f"{y} is not a point of the {'star ' if star else ''}structure")
    if not 1 <= k <= len(pts):
        raise DomainError(f"k={k} outside 1..{len(pts)}")
    table = addition_table(G).tolist()
    neg = [row.index(0) for row in table]
    rest = [p for p in pts if p != yi]
    C = dp_counts(table, rest, k - 1, budget)
    return C[k - 1][table[element_index(G, x)][neg[yi]]]


def dp_replication_profile(
    table: Sequence[Sequence[int]],
    points: Sequence[int],
    k: int,
    target: int,
    budget: int = DP_BUDGET,
) -> list[int]:
    """Replication count of every point of ``points`` for the k-subsets summing to ``target``."""
    n = len(table)
    neg = [row.index(0) for row in table]
    C = dp_counts(table, points, k, budget)
    out = []
    for y in points:
        # peel y back off the full table: W[j][s] counts j-subsets avoiding y
        shift = [table[s][neg[y]] for s in range(n)]
        W = [C[0][:]]
        for j in range(1, k):
            prev = W[-1]
            W.append([C[j][s] - prev[shift[s]] for s in range(n)])
        out.append(W[k - 1][table[target][neg[y]]])
    return out


def find_subset_with_sum(
    table: Sequence[Sequence[int]], points: Sequence[int], k: int, target: int
) -> tuple[int, ...] | None:
    """Some k-subset of ``points`` summing to ``target`` (first found by DP backtracking)."""
    m = len(points)
    # reach[i][j] = set of sums attainable by j-subsets of points[i:]
    reach = [[set() for _ in range(k + 1)] for _ in range(m + 1)]
    reach[m][0].add(0)
    for i in range(m - 1, -1, -1):
        p = points[i]
        for j in range(k + 1):
            cur = set(reach[i + 1][j])
            if j:
                cur.update(table[s][p] for s in reach[i + 1][j - 1])
            reach[i][j] = cur
    if target not in reach[0][k]:
        return None
    neg = [row.index(0) for row in table]
    chosen = []
    need, j = target, k
    for i in range(m):
        if j == 0:
            break
        p = points[i]
        rest = table[need][neg[p]]
        if rest in reach[i + 1][j - 1]:
            chosen.append(p)
            need, j = rest, j - 1
    assert j == 0 and need == 0 and len(chosen) == k
    return tuple(chosen)


@dataclass(frozen=True)
class ScanRecord:
    group: GroupSpec
    k: int
    e: int
    x: GroupElement
    report: DesignCheckReport

    def as_dict(self) -> dict:
        r = self.report
        d = {
            "group": self.group.text(),
            "k": self.k,
            "e": self.e,
            "x": self.x.text(),
            "t": r.t,
            "is_design": r.is_t_design,
            "lambda": r.lam,
            "blocks": r.blocks,
            "flag": r.flag,
        }
        if r.counterexample is not None:
            G = self.group
            d["counterexample"] = [
                [GroupElement(G, index_to_coords(G, i)).text() for i in T] for T in r.counterexample
            ]
            d["coverage"] = list(r.coverage)
        return d


@dataclass(frozen=True)
class ScanReport:
    records: tuple[ScanRecord, ...]
    scanned: tuple[GroupSpec, ...]
    skipped: tuple[tuple[GroupSpec, str], ...]
    frontier: tuple[tuple[GroupSpec, str], ...]  # groups left unscanned for budget reasons

    @property
    def designs_found(self) -> tuple[ScanRecord, ...]:
        return tuple(r for r in self.records if r.report.is_t_design)

    @property
    def complete(self) -> bool:
        return not self.frontier

    def summary(self) -> dict:
        return {
            "groups_scanned": len(self.scanned),
            "parameter_pairs": len(self.records),
            "designs_found": len(self.designs_found),
            "skipped": [[G.text(), why] for G, why in self.skipped],
            "frontier": [[G.text(), why] for G, why in self.frontier],
            "complete": self.complete,
        }


def scan_targets(G: GroupSpec, xmode: str) -> list[tuple[int, GroupElement]]:
    """``(e(x), x)`` pairs to scan: one per e-class, or every element."""
    if xmode == "eclass":
        return eclass_representatives(G)
    if xmode == "all":
        return [(e_of(G, x), x) for x in enumerate_elements(G)]
    raise DomainError(f"unknown x mode {xmode!r}")


def scan_group(
    G: GroupSpec, t: int = 2, xmode: str = "eclass", mask_budget: int = SUBSET_BUDGET
) -> list[ScanRecord]:
    """Brute-force t-design test of ``(G, B_k^x)`` for every ``1 <= k <= n-1`` and target."""
    n = G.order
    tsubsets, cov = coverage_census(G, t, False, mask_budget)
    H = census_counts(G, False)
    out = []
    for k in range(1, n):
        for e, x in scan_targets(G, xmode):
            xi = element_index(G, x)
            b = int(H[k, xi])
            if k < t:
                rep = DesignCheckReport(t, False, flag="block-size-below-t", blocks=b)
            else:
                rep = design_from_coverage(tsubsets, cov[:, k, xi], b, t)
            out.append(ScanRecord(G, k, e, x, rep))
    return out


def conjecture_groups(orders: range) -> tuple[list[GroupSpec], list[tuple[GroupSpec, str]]]:
    """Non-elementary abelian p-groups with order in range, plus the skipped elementary ones."""
    keep, skipped = [], []
    for n in orders:
        if n < 2 or len(prime_factors(n)) != 1:
            continue
        for G in all_groups_of_order(n):
            if G.is_elementary():
                skipped.append((G, "elementary abelian"))
            else:
                keep.append(G)
    return keep, skipped


def conjecture_scan(
    orders: range,
    mask_budget: int = SUBSET_BUDGET,
    t: int = 2,
    xmode: str = "eclass",
    mapper=map,
) -> ScanReport:
    """Search non-elementary abelian p-groups for t-designs ``(G, B_k^x)``.

    Groups whose census exceeds ``mask_budget`` are listed in the frontier
    rather than scanned.  ``mapper`` may be a parallel map; results are merged
    in group order.
    """
    groups, skipped = conjecture_groups(orders)
    todo, frontier = [], []
    for G in groups:
        v = G.order
        visits = comb(v, t) * 2 ** (v - t)
        if visits > mask_budget:
            frontier.append((G, f"{visits} subset visits exceed the budget {mask_budget}"))
        else:
            todo.append(G)
    results = list(mapper(_scan_job, [(G, t, xmode, mask_budget) for G in todo]))
    records = tuple(r for rs in results for r in rs)
    return ScanReport(records, tuple(todo), tuple(skipped), tuple(frontier))


def _scan_job(args) -> list[ScanRecord]:
    return scan_group(*args)
