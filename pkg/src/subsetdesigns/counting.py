"""Closed-form counts of k-subsets of a finite abelian group with a prescribed sum.

``count_subsets(G, k, x)`` is the number of k-subsets of ``G`` summing to ``x``;
``count_subsets_star`` does the same over ``G`` minus the identity.  Both are
evaluated through the Moebius-inverted torsion sums, in exact integer
arithmetic.  The counts depend on ``x`` only through ``e_of(G, x)``, so the
work is memoised on ``(factors, k, e, star)``.

>>> from subsetdesigns.groups import GroupSpec, element
>>> G = GroupSpec((3, 3))
>>> count_subsets(G, 3, G.identity)
12
>>> count_subsets_star(GroupSpec((9,)), 2, element(GroupSpec((9,)), 6))
3
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from .errors import DomainError, InconsistentParametersError
from .groups import (
    GroupElement,
    GroupSpec,
    _check,
    divisors,
    e_of,
    mobius,
    sum_of_two_torsion,
    torsion_count,
)


@dataclass(frozen=True)
class CountQuery:
    group: GroupSpec
    k: int
    x: GroupElement
    star: bool = False

    def __post_init__(self):
        _check(self.group, self.x)
        top = self.group.order - (1 if self.star else 0)
        if not 0 <= self.k <= top:
            raise DomainError(f"k={self.k} outside 0..{top}")

    def evaluate(self) -> int:
        if self.star:
            return count_subsets_star(self.group, self.k, self.x)
        return count_subsets(self.group, self.k, self.x)


def _torsion_mobius_sum(G: GroupSpec, e: int, s: int) -> int:
    return sum(mobius(s // d) * torsion_count(G, d) for d in divisors(gcd(e, s)))


@lru_cache(maxsize=1 << 16)
def _count(G: GroupSpec, k: int, e: int) -> int:
    n = G.order
    total = 0
    for s in divisors(gcd(G.exponent, k)):
        sign = -1 if (k + k // s) % 2 else 1
        total += sign * comb(n // s, k // s) * _torsion_mobius_sum(G, e, s)
    q, r = divmod(total, n)
    if r:
        raise ArithmeticError(f"non-integral subset count for {G}, k={k}, e={e}")
    return q


@lru_cache(maxsize=1 << 16)
def _count_star(G: GroupSpec, k: int, e: int) -> int:
    n = G.order
    total = 0
    for s in divisors(G.exponent):
        sign = -1 if (k + k // s) % 2 else 1
        total += sign * comb(n // s - 1, k // s) * _torsion_mobius_sum(G, e, s)
    q, r = divmod(total, n)
    if r:
        raise ArithmeticError(f"non-integral star count for {G}, k={k}, e={e}")
    return q


def count_subsets(G: GroupSpec, k: int, x: GroupElement) -> int:
    """Number of k-subsets of ``G`` whose elements sum to ``x``."""
    CountQuery(G, k, x, star=False)
    if k == 0:
        return int(x.is_identity())
    return _count(G, k, e_of(G, x))


def count_subsets_star(G: GroupSpec, k: int, x: GroupElement) -> int:
    """Number of k-subsets of ``G`` minus the identity summing to ``x``."""
    CountQuery(G, k, x, star=True)
    if k == 0:
        return int(x.is_identity())
    return _count_star(G, k, e_of(G, x))


def is_empty_family(G: GroupSpec, k: int, x: GroupElement) -> bool:
    """Whether no k-subset of ``G`` sums to ``x`` (decided without counting)."""
    _check(G, x)
    n = G.order
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside 1..{n}")
    if k == n:
        return x != sum_of_two_torsion(G)
    if G.exponent == 2 and x.is_identity() and (k == 2 or k == n - 2 >= 2):
        return True
    return False


def replication(G: GroupSpec, k: int, x: GroupElement, y: GroupElement) -> int:
    """Number of k-subsets summing to ``x`` that contain ``y``.

    Translating by ``-y`` matches them with (k-1)-subsets of the non-identity
    elements summing to ``x - k*y``.
    """
    _check(G, x, y)
    if not 2 <= k <= G.order:
        raise DomainError(f"replication needs 2 <= k <= {G.order}, got k={k}")
    return count_subsets_star(G, k - 1, x - k * y)


def _exact_div(num: int, den: int, what: str) -> int:
    q, r = divmod(num, den)
    if r or den == 0:
        raise InconsistentParametersError(f"{what}: {num}/{den} is not an integer")
    return q


def lambda_convert(t: int, v: int, k: int, lambda_t: int, i: int) -> int:
    """lambda_i of a t-(v, k, lambda_t) design viewed as an i-design."""
    if not 1 <= i <= t <= k <= v:
        raise DomainError(f"need 1 <= i <= t <= k <= v, got i={i} t={t} k={k} v={v}")
    return _exact_div(
        lambda_t * comb(v - i, t - i), comb(k - i, t - i), f"lambda_{i} of t={t} design"
    )


def block_count(t: int, v: int, k: int, lambda_t: int) -> int:
    """Number of blocks of a t-(v, k, lambda_t) design."""
    if not 1 <= t <= k <= v:
        raise DomainError(f"need 1 <= t <= k <= v, got t={t} k={k} v={v}")
    return _exact_div(comb(v, t) * lambda_t, comb(k, t), "block count")


def lambda_from_blocks(t: int, v: int, k: int, blocks: int) -> int:
    """Inverse of :func:`block_count`: lambda_t from the number of blocks."""
    if not 1 <= t <= k <= v:
        raise DomainError(f"need 1 <= t <= k <= v, got t={t} k={k} v={v}")
    return _exact_div(comb(k, t) * blocks, comb(v, t), "lambda from block count")
