"""Finite abelian groups given by invariant factors.

A group is stored in invariant-factor normal form ``Z_{n_1} + ... + Z_{n_m}``
with ``n_1 | n_2 | ... | n_m``.  Any list of cyclic orders is accepted and
regrouped through its prime-power parts, so ``GroupSpec((4, 6))`` and
``GroupSpec((2, 12))`` compare equal.

Elements are coordinate vectors of residues.  Enumeration order is
lexicographic in the coordinates, which coincides with the mixed-radix
index returned by :func:`element_index`; every deterministic ordering in the
package derives from it.

>>> G = GroupSpec((2, 3))
>>> G.factors
(6,)
>>> torsion_count(GroupSpec((2, 4)), 2)
4
>>> e_of(GroupSpec((4,)), element(GroupSpec((4,)), 2))
2
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm, prod
from typing import Iterable, Iterator, Sequence

import numpy as np
from sympy import divisors as _sympy_divisors
from sympy import factorint, isprime

from .errors import DomainError, InvalidSpecError, ResourceError

ENUMERATION_BUDGET = 10**7


class Valuation(enum.Enum):
    """Distinguished value of a p-adic valuation that is not an integer."""

    INFINITY = "inf"

    def __repr__(self) -> str:
        return "INFINITY"


INFINITY = Valuation.INFINITY


@lru_cache(maxsize=None)
def prime_factors(n: int) -> dict[int, int]:
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    return {int(p): int(e) for p, e in factorint(n).items()}


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    """Positive divisors of ``n`` in ascending order."""
    if n < 1:
        raise DomainError(f"divisors of {n} are not defined here")
    return tuple(int(d) for d in _sympy_divisors(n))


def canonicalize(factors: Iterable[int]) -> tuple[int, ...]:
    """Invariant-factor chain of the direct sum of cyclic groups of the given orders.

    >>> canonicalize([4, 6])
    (2, 12)
    >>> canonicalize([1, 1])
    (1,)
    """
    factors = list(factors)
    if not factors:
        raise InvalidSpecError("a group needs at least one factor")
    powers: dict[int, list[int]] = {}
    for n in factors:
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise InvalidSpecError(f"factor {n!r} is not an integer")
        if n <= 0:
            raise InvalidSpecError(f"factor {n} must be >= 1")
        for p, e in prime_factors(int(n)).items():
            powers.setdefault(p, []).append(p**e)
    if not powers:
        return (1,)
    length = max(len(v) for v in powers.values())
    chain = [1] * length
    for p, parts in powers.items():
        parts.sort(reverse=True)
        for i, q in enumerate(parts):
            chain[length - 1 - i] *= q
    return tuple(chain)


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group, normalised to its invariant factors."""

    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", canonicalize(self.factors))

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Read the comma-separated factor format, e.g. ``"2,4"``."""
        try:
            parts = [int(s) for s in text.replace(" ", "").split(",") if s != ""]
        except ValueError:
            raise InvalidSpecError(f"bad group spec {text!r}") from None
        return cls(tuple(parts))

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1]

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def is_p_group(self) -> bool:
        return len(prime_factors(self.order)) == 1

    @property
    def prime(self) -> int:
        """The prime of a p-group."""
        primes = list(prime_factors(self.order))
        if len(primes) != 1:
            raise DomainError(f"{self} is not a p-group")
        return primes[0]

    def is_elementary(self) -> bool:
        return self.exponent > 1 and isprime(self.exponent)

    def __str__(self) -> str:
        return " + ".join(f"Z{n}" for n in self.factors)

    def text(self) -> str:
        return ",".join(str(n) for n in self.factors)


@dataclass(frozen=True)
class GroupElement:
    group: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != self.group.rank:
            raise DomainError(
                f"{len(coords)} coordinates given for {self.group} (rank {self.group.rank})"
            )
        object.__setattr__(
            self, "coords", tuple(c % n for c, n in zip(coords, self.group.factors))
        )

    def is_identity(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return add(self.group, self, other)

    def __neg__(self) -> "GroupElement":
        return neg(self.group, self)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return add(self.group, self, neg(self.group, other))

    def __rmul__(self, k: int) -> "GroupElement":
        return scalar_mul(self.group, k, self)

    def __str__(self) -> str:
        if self.group.rank == 1:
            return str(self.coords[0])
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def text(self) -> str:
        return ",".join(str(c) for c in self.coords)


def element(G: GroupSpec, *coords: int | Sequence[int]) -> GroupElement:
    """Build an element of ``G``; accepts ``element(G, 1, 2)`` or ``element(G, (1, 2))``."""
    if len(coords) == 1 and not isinstance(coords[0], (int, np.integer)):
        coords = tuple(coords[0])
    return GroupElement(G, tuple(coords))


def parse_element(G: GroupSpec, text: str) -> GroupElement:
    try:
        coords = tuple(int(s) for s in text.replace(" ", "").split(","))
    except ValueError:
        raise InvalidSpecError(f"bad element spec {text!r}") from None
    return GroupElement(G, coords)


def _check(G: GroupSpec, *elems: GroupElement) -> None:
    for a in elems:
        if a.group != G:
            raise DomainError(f"element {a} belongs to {a.group}, not {G}")


def add(G: GroupSpec, a: GroupElement, b: GroupElement) -> GroupElement:
    _check(G, a, b)
    return GroupElement(G, tuple(x + y for x, y in zip(a.coords, b.coords)))


def neg(G: GroupSpec, a: GroupElement) -> GroupElement:
    _check(G, a)
    return GroupElement(G, tuple(-x for x in a.coords))


def scalar_mul(G: GroupSpec, k: int, a: GroupElement) -> GroupElement:
    _check(G, a)
    return GroupElement(G, tuple(k * x for x in a.coords))


def element_order(G: GroupSpec, a: GroupElement) -> int:
    _check(G, a)
    return lcm(*(n // gcd(x, n) for x, n in zip(a.coords, G.factors)))


def torsion_count(G: GroupSpec, d: int) -> int:
    """Size of the d-torsion subgroup ``G[d] = {g : d g = 0}``."""
    if d <= 0:
        raise DomainError(f"torsion index must be >= 1, got {d}")
    return prod(gcd(d, n) for n in G.factors)


def e_of(G: GroupSpec, x: GroupElement) -> int:
    """Largest divisor ``d`` of exp(G) with ``x`` in ``dG``."""
    _check(G, x)
    return _e_of_coords(G.factors, x.coords)


@lru_cache(maxsize=1 << 16)
def _e_of_coords(factors: tuple[int, ...], coords: tuple[int, ...]) -> int:
    best = 1
    for d in divisors(factors[-1]):
        if all(c % gcd(d, n) == 0 for c, n in zip(coords, factors)):
            best = d
    return best


def mobius(n: int) -> int:
    if n <= 0:
        raise DomainError(f"Mobius function undefined at {n}")
    exps = prime_factors(n)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def p_valuation(N: int, p: int) -> int | Valuation:
    """Exponent of ``p`` in ``N``; :data:`INFINITY` when ``N == 0``."""
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    if N == 0:
        return INFINITY
    N = abs(N)
    s = 0
    while N % p == 0:
        N //= p
        s += 1
    return s


def enumerate_elements(G: GroupSpec, budget: int = ENUMERATION_BUDGET) -> Iterator[GroupElement]:
    """All elements of ``G`` in lexicographic coordinate order."""
    if G.order > budget:
        raise ResourceError(f"{G} has {G.order} elements, budget is {budget}")
    for idx in range(G.order):
        yield GroupElement(G, index_to_coords(G, idx))


def index_to_coords(G: GroupSpec, idx: int) -> tuple[int, ...]:
    coords = []
    for n in reversed(G.factors):
        idx, r = divmod(idx, n)
        coords.append(r)
    return tuple(reversed(coords))


def element_index(G: GroupSpec, x: GroupElement) -> int:
    """Position of ``x`` in :func:`enumerate_elements` order."""
    _check(G, x)
    idx = 0
    for c, n in zip(x.coords, G.factors):
        idx = idx * n + c
    return idx


def addition_table(G: GroupSpec) -> np.ndarray:
    """``T[i, j]`` is the index of element ``i`` plus element ``j``."""
    n = G.order
    coords = np.array([index_to_coords(G, i) for i in range(n)], dtype=np.int64).reshape(n, G.rank)
    mods = np.array(G.factors, dtype=np.int64)
    weights = np.array(
        [prod(G.factors[i + 1:]) for i in range(G.rank)], dtype=np.int64
    )
    summed = (coords[:, None, :] + coords[None, :, :]) % mods
    return (summed * weights).sum(axis=-1)


def sum_of_two_torsion(G: GroupSpec) -> GroupElement:
    """Sum of all elements of order at most 2, which is also the sum of all of ``G``."""
    total = [0] * G.rank
    for i, n in enumerate(G.factors):
        if n % 2 == 0:
            # G[2] has 2**r elements; coordinate i equals n/2 on half of them.
            r = sum(1 for m in G.factors if m % 2 == 0)
            total[i] = (n // 2) * 2 ** (r - 1)
    return GroupElement(G, tuple(total))


def eclass_representatives(G: GroupSpec) -> list[tuple[int, GroupElement]]:
    """One ``(e, x)`` pair per attained value of ``e``; ``x`` is the first element
    in enumeration order with that value."""
    seen: dict[int, GroupElement] = {}
    for x in enumerate_elements(G):
        e = e_of(G, x)
        if e not in seen:
            seen[e] = x
    return list(seen.items())


def all_groups_of_order(n: int) -> list[GroupSpec]:
    """Every isomorphism type of abelian group of order ``n``, in a fixed order."""
    if n < 1:
        raise DomainError(f"no groups of order {n}")
    per_prime = []
    for p, e in sorted(prime_factors(n).items()):
        per_prime.append([[p**a for a in part] for part in _partitions(e)])
    groups: list[GroupSpec] = [GroupSpec((1,))]
    for options in per_prime:
        groups = [GroupSpec(g.factors + tuple(opt)) for g in groups for opt in options]
    return sorted(set(groups), key=lambda g: (len(g.factors), g.factors))


def _partitions(e: int, largest: int | None = None) -> list[list[int]]:
    largest = e if largest is None else largest
    if e == 0:
        return [[]]
    out = []
    for first in range(min(e, largest), 0, -1):
        for rest in _partitions(e - first, first):
            out.append([first] + rest)
    return out
