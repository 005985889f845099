"""Elliptic curves over prime fields and their evaluation codes.

A curve ``y^2 = x^3 + a*x + b`` over ``F_p`` (``p > 3``) is enumerated point by
point.  Its group of rational points is identified with an abstract
:class:`GroupSpec` through explicit generators, so questions about zero-sum
subsets of points are answered by the group-level counting and oracle code.

The evaluation code for ``G = kO`` evaluates the Riemann-Roch basis
``x^i y^j`` (``2i + 3j <= k``) at every affine point.  Code coordinates follow
the point order: x ascending, then y ascending.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from math import comb, isqrt, lcm

import numpy as np
from sympy import isprime

from .counting import count_subsets_star, lambda_from_blocks
from .designs import check_2design_elementary
from .errors import DomainError, InapplicableError, InvalidSpecError, InvariantViolation, ResourceError
from .gf import batched_singular, kernel_vector, rank_mod_p
from .groups import GroupElement, GroupSpec, addition_table, element_index, prime_factors
from .oracle import (
    DP_BUDGET,
    SUBSET_BUDGET,
    DesignCheckReport,
    check_blocks,
    dp_counts,
    dp_replication_profile,
    find_subset_with_sum,
)

POINT_BUDGET = 10**4  # largest p enumerated by default


@dataclass(frozen=True)
class CurveSpec:
    p: int
    a: int
    b: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p <= 3 or not isprime(self.p):
            raise InvalidSpecError(f"p must be a prime > 3, got {self.p}")
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if self.discriminant == 0:
            raise InvalidSpecError(
                f"singular curve: -16(4a^3 + 27b^2) = 0 mod {self.p} for a={self.a}, b={self.b}"
            )

    @property
    def discriminant(self) -> int:
        return (-16 * (4 * self.a**3 + 27 * self.b**2)) % self.p

    @classmethod
    def parse(cls, text: str) -> "CurveSpec":
        """Parse ``"p=43,a=0,b=3"``."""
        fields = {}
        for part in text.replace(" ", "").split(","):
            key, sep, val = part.partition("=")
            if not sep or key not in ("p", "a", "b") or key in fields:
                raise InvalidSpecError(f"bad curve spec {text!r}; expected p=..,a=..,b=..")
            try:
                fields[key] = int(val)
            except ValueError:
                raise InvalidSpecError(f"bad integer {val!r} in curve spec") from None
        if len(fields) != 3:
            raise InvalidSpecError(f"curve spec {text!r} needs p, a and b")
        return cls(fields["p"], fields["a"], fields["b"])

    def text(self) -> str:
        return f"p={self.p},a={self.a},b={self.b}"

    def contains(self, P: "CurvePoint") -> bool:
        if P.is_infinity():
            return True
        x, y = P.x, P.y
        return 0 <= x < self.p and 0 <= y < self.p and (y * y - x**3 - self.a * x - self.b) % self.p == 0


@dataclass(frozen=True, order=True)
class CurvePoint:
    """An affine point, or the point at infinity when both coordinates are ``None``."""

    x: int | None
    y: int | None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise DomainError("both coordinates or neither must be None")

    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        return "O" if self.is_infinity() else f"({self.x},{self.y})"

    def sort_key(self) -> tuple:
        return (1, 0, 0) if self.is_infinity() else (0, self.x, self.y)


INFINITY = CurvePoint(None, None)


def _on(E: CurveSpec, *pts: CurvePoint) -> None:
    for P in pts:
        if not E.contains(P):
            raise DomainError(f"{P} is not on {E.text()}")


def point_neg(E: CurveSpec, P: CurvePoint) -> CurvePoint:
    _on(E, P)
    if P.is_infinity():
        return P
    return CurvePoint(P.x, (-P.y) % E.p)


def _add(E: CurveSpec, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.is_infinity():
        return Q
    if Q.is_infinity():
        return P
    p = E.p
    if P.x == Q.x:
        if (P.y + Q.y) % p == 0:
            return INFINITY
        lam = (3 * P.x * P.x + E.a) * pow(2 * P.y, -1, p) % p
    else:
        lam = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
    x3 = (lam * lam - P.x - Q.x) % p
    return CurvePoint(x3, (lam * (P.x - x3) - P.y) % p)


def point_add(E: CurveSpec, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-and-tangent sum."""
    _on(E, P, Q)
    return _add(E, P, Q)


def _mul(E: CurveSpec, k: int, P: CurvePoint) -> CurvePoint:
    if k < 0:
        k, P = -k, (P if P.is_infinity() else CurvePoint(P.x, (-P.y) % E.p))
    acc = INFINITY
    while k:
        if k & 1:
            acc = _add(E, acc, P)
        P = _add(E, P, P)
        k >>= 1
    return acc


def point_scalar_mul(E: CurveSpec, k: int, P: CurvePoint) -> CurvePoint:
    """``k*P`` by double-and-add; negative ``k`` uses ``-P``."""
    _on(E, P)
    return _mul(E, k, P)


def enumerate_points(E: CurveSpec, budget: int = POINT_BUDGET) -> list[CurvePoint]:
    """All rational points, x ascending then y ascending, with O last."""
    return list(_points(E, budget))


@lru_cache(maxsize=64)
def _points(E: CurveSpec, budget: int) -> tuple[CurvePoint, ...]:
    p = E.p
    if p > budget:
        raise ResourceError(f"p={p} exceeds the point-enumeration budget {budget}")
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    pts = []
    for x in range(p):
        for y in roots.get((x**3 + E.a * x + E.b) % p, ()):
            pts.append(CurvePoint(x, y))
    pts.append(INFINITY)
    N = len(pts)
    if (N - p - 1) ** 2 > 4 * p:
        raise InvariantViolation(f"Hasse bound fails: #E={N}, p={p}")
    return tuple(pts)


def point_order(E: CurveSpec, P: CurvePoint, N: int) -> int:
    """Order of ``P`` in a group of order ``N``."""
    order = N
    for q in prime_factors(N):
        while order % q == 0 and _mul(E, order // q, P).is_infinity():
            order //= q
    return order


class StructureKind(enum.Enum):
    CYCLIC = "cyclic"
    PRODUCT = "product"


@dataclass(frozen=True)
class GroupStructure:
    kind: StructureKind
    n1: int
    n2: int

    def __post_init__(self):
        if self.n2 % self.n1:
            raise InvariantViolation(f"{self.n1} does not divide {self.n2}")
        if (self.kind is StructureKind.CYCLIC) != (self.n1 == 1):
            raise InvariantViolation("cyclic structures have n1 = 1")

    @property
    def order(self) -> int:
        return self.n1 * self.n2

    @property
    def exponent(self) -> int:
        return self.n2

    def group(self) -> GroupSpec:
        return GroupSpec((self.n1, self.n2))

    def __str__(self) -> str:
        if self.kind is StructureKind.CYCLIC:
            return f"CYCLIC({self.n2})"
        return f"PRODUCT({self.n1}, {self.n2})"


@dataclass(frozen=True)
class PointGroup:
    """The rational points of a curve together with an isomorphism onto a :class:`GroupSpec`.

    ``coords[i]`` is the abstract element matching ``points[i]``.  The
    isomorphism sends ``i*Q + j*P`` to ``(i, j)`` for generators ``Q``, ``P``
    of orders ``n1`` and ``n2``.
    """

    curve: CurveSpec
    points: tuple[CurvePoint, ...]
    structure: GroupStructure
    generators: tuple[CurvePoint, CurvePoint]
    coords: tuple[GroupElement, ...]

    @property
    def group(self) -> GroupSpec:
        return self.structure.group()

    @cached_property
    def affine(self) -> tuple[CurvePoint, ...]:
        return self.points[:-1]

    @cached_property
    def star_indices(self) -> list[int]:
        """Abstract element index of each affine point, in code coordinate order."""
        G = self.group
        return [element_index(G, c) for c in self.coords[:-1]]

    def element_of(self, P: CurvePoint) -> GroupElement:
        return self.coords[self.points.index(P)]


def group_structure(E: CurveSpec) -> GroupStructure:
    """Structure of ``E(F_p)`` from the exponent (lcm of point orders)."""
    return point_group(E).structure


@lru_cache(maxsize=64)
def point_group(E: CurveSpec, budget: int = POINT_BUDGET) -> PointGroup:
    pts = _points(E, budget)
    N = len(pts)
    orders = [point_order(E, P, N) for P in pts]
    e = lcm(*orders)
    n1 = N // e
    if N % e or e % n1:
        raise InvariantViolation(f"#E={N} with exponent {e} is not Z_n1 + Z_n2 with n1 | n2")
    kind = StructureKind.CYCLIC if n1 == 1 else StructureKind.PRODUCT
    structure = GroupStructure(kind, n1, e)
    P = pts[orders.index(e)]
    span = [INFINITY]
    for _ in range(e - 1):
        span.append(_add(E, span[-1], P))
    cyclic_part = {Y: j for j, Y in enumerate(span)}
    coords: dict[CurvePoint, tuple[int, int]] = {}
    Q = INFINITY
    if n1 == 1:
        coords = {Y: (0, j) for Y, j in cyclic_part.items()}
    else:
        for cand, o in zip(pts, orders):
            if n1 % o:
                continue
            trial = {}
            base = INFINITY
            for i in range(n1):
                for j, Y in enumerate(span):
                    trial[_add(E, base, Y)] = (i, j)
                base = _add(E, base, cand)
            if len(trial) == N:
                Q, coords = cand, trial
                break
        else:
            raise InvariantViolation(f"no complementary generator found on {E.text()}")
    G = structure.group()
    elems = []
    for Y in pts:
        i, j = coords[Y]
        elems.append(GroupElement(G, (j,) if n1 == 1 else (i, j)))
    return PointGroup(E, pts, structure, (Q, P), tuple(elems))


def check_group_law(E: CurveSpec, seed: int, samples: int = 100) -> dict:
    """Sampled associativity and commutativity, exhaustive inverse law."""
    pts = _points(E, POINT_BUDGET)
    rng = random.Random(seed)
    assoc = comm = 0
    for _ in range(samples):
        P, Q, R = (rng.choice(pts) for _ in range(3))
        assoc += _add(E, _add(E, P, Q), R) == _add(E, P, _add(E, Q, R))
        comm += _add(E, P, Q) == _add(E, Q, P)
    inv = sum(_add(E, P, point_neg(E, P)).is_infinity() for P in pts)
    return {
        "associativity": f"{assoc}/{samples}",
        "commutativity": f"{comm}/{samples}",
        "inverse": f"{inv}/{len(pts)}",
        "ok": assoc == samples and comm == samples and inv == len(pts),
    }


@dataclass(frozen=True, order=True)
class Monomial:
    i: int
    j: int

    @property
    def pole_order(self) -> int:
        return 2 * self.i + 3 * self.j

    def __call__(self, P: CurvePoint, p: int) -> int:
        return pow(P.x, self.i, p) * pow(P.y, self.j, p) % p

    def __str__(self) -> str:
        parts = [f"x^{self.i}" if self.i > 1 else "x" * self.i, "y" * self.j]
        return "*".join(s for s in parts if s) or "1"


def rr_basis(k: int) -> list[Monomial]:
    """Basis of L(kO): ``x^i y^j`` with ``j <= 1`` and ``2i + 3j <= k``, by pole order."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    mons = [Monomial(i, j) for j in (0, 1) for i in range(k // 2 + 1) if 2 * i + 3 * j <= k]
    return sorted(mons, key=lambda m: m.pole_order)


@dataclass(frozen=True)
class EvalCode:
    curve: CurveSpec
    k: int
    points: tuple[CurvePoint, ...]
    generator_matrix: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.points)

    def matrix(self) -> np.ndarray:
        return np.array(self.generator_matrix, dtype=np.int64)

    def to_csv(self) -> str:
        return "".join(",".join(map(str, row)) + "\n" for row in self.generator_matrix)


def _evaluate(basis: list[Monomial], pts, p: int) -> np.ndarray:
    return np.array([[m(P, p) for P in pts] for m in basis], dtype=np.int64)


@lru_cache(maxsize=256)
def build_code(E: CurveSpec, k: int) -> EvalCode:
    """Evaluation code of ``L(kO)`` on every affine point."""
    pts = point_group(E).affine
    n = len(pts)
    if not 1 <= k <= n - 1:
        raise DomainError(f"k={k} outside 1..{n - 1}")
    M = _evaluate(rr_basis(k), pts, E.p)
    if rank_mod_p(M, E.p) != k:
        raise InvariantViolation(f"generator matrix for k={k} is not of full rank")
    return EvalCode(E, k, pts, tuple(tuple(int(v) for v in row) for row in M))


def _positions(E: CurveSpec, S) -> list[int]:
    aff = point_group(E).affine
    pos = []
    for P in S:
        _on(E, P)
        if P.is_infinity():
            raise DomainError("O is not a point of E*")
        pos.append(aff.index(P))
    if len(set(pos)) != len(pos):
        raise DomainError("points are not distinct")
    return pos


def singularity_tests(E: CurveSpec, k: int, S) -> tuple[bool, bool]:
    """``(rank test, group-sum test)`` for a k-subset ``S`` of affine points."""
    pos = _positions(E, S)
    if len(pos) != k or k < 1:
        raise DomainError(f"need {k} points, got {len(pos)}")
    M = _evaluate(rr_basis(k), [point_group(E).affine[i] for i in pos], E.p)
    singular = rank_mod_p(M, E.p) < k
    total = INFINITY
    for P in S:
        total = _add(E, total, P)
    return singular, total.is_infinity()


def zero_sum_singularity(E: CurveSpec, k: int, S) -> bool:
    """Whether the basis evaluated at ``S`` is singular, which must coincide with ``sum(S) = O``."""
    singular, zero = singularity_tests(E, k, S)
    if singular != zero:
        raise InvariantViolation(f"rank test {singular} but group-sum test {zero} for {list(map(str, S))}")
    return singular


@dataclass(frozen=True)
class ZeroSumCensus:
    k: int
    subsets: int
    zero_sum: int


def zero_sum_census(E: CurveSpec, k: int, budget: int = 10**6, batch: int = 1 << 14) -> ZeroSumCensus:
    """Every k-subset of affine points: rank test and group-sum test, batched.

    Raises :class:`InvariantViolation` on any disagreement.
    """
    pg = point_group(E)
    n = len(pg.affine)
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside 1..{n}")
    total = comb(n, k)
    if total > budget:
        raise ResourceError(f"C({n},{k}) = {total} subsets exceed the budget {budget}")
    M = _evaluate(rr_basis(k), pg.affine, E.p)
    table = addition_table(pg.group)
    idx = np.array(pg.star_indices, dtype=np.int64)
    zero = 0
    it = combinations(range(n), k)
    while True:
        chunk = np.array([c for _, c in zip(range(batch), it)], dtype=np.int64)
        if chunk.size == 0:
            break
        mats = np.transpose(M[:, chunk], (1, 0, 2))
        sing = batched_singular(mats, E.p)
        s = np.zeros(len(chunk), dtype=np.int64)
        for col in range(k):
            s = table[s, idx[chunk[:, col]]]
        zs = s == 0
        if not np.array_equal(sing, zs):
            bad = chunk[int(np.nonzero(sing != zs)[0][0])]
            raise InvariantViolation(f"rank and group-sum tests disagree on positions {bad.tolist()}")
        zero += int(zs.sum())
    return ZeroSumCensus(k, total, zero)


class CodeClass(enum.Enum):
    MDS = "MDS"
    NMDS = "NMDS"


def zero_sum_count(E: CurveSpec, k: int, budget: int = DP_BUDGET) -> int:
    """Number of k-subsets of ``E*`` summing to O, by DP over the abstract group."""
    pg = point_group(E)
    C = dp_counts(addition_table(pg.group).tolist(), pg.star_indices, k, budget)
    return C[k][0] if k < len(C) else 0


def classify_mds(E: CurveSpec, k: int, budget: int = DP_BUDGET) -> CodeClass:
    """MDS iff no k-subset of ``E*`` sums to O."""
    n = len(point_group(E).affine)
    if not 1 <= k <= n - 1:
        raise DomainError(f"k={k} outside 1..{n - 1}")
    return CodeClass.NMDS if zero_sum_count(E, k, budget) else CodeClass.MDS


def minimum_distance(E: CurveSpec, k: int) -> int:
    n = len(point_group(E).affine)
    return n - k if classify_mds(E, k) is CodeClass.NMDS else n - k + 1


def _support_theorem(E: CurveSpec, k: int, t: int) -> DesignCheckReport:
    pg = point_group(E)
    st = pg.structure
    n = len(pg.affine)
    if st.kind is not StructureKind.PRODUCT or k % st.n2:
        raise InapplicableError(f"theorem inapplicable: needs Z_n1 + Z_n2 with n2 | k ({st}, k={k})")
    G = pg.group
    if t != 1 or not G.is_elementary():
        raise InapplicableError(
            f"theorem inapplicable: no closed-form {t + 1}-design criterion for {G}"
        )
    if not check_2design_elementary(G, k, G.identity).is_design:
        raise InapplicableError(f"theorem inapplicable: (G, B_{k}) is not a 2-design")
    b = count_subsets_star(G, k, G.identity)
    return DesignCheckReport(t, True, lam=lambda_from_blocks(t, n, n - k, b), blocks=b, flag="theorem")


def _support_dp(E: CurveSpec, k: int, budget: int) -> DesignCheckReport:
    pg = point_group(E)
    table = addition_table(pg.group).tolist()
    pts = pg.star_indices
    C = dp_counts(table, pts, k, budget)
    b = C[k][0]
    prof = dp_replication_profile(table, pts, k, 0, budget)
    supports_through = [b - r for r in prof]  # a point lies in a support iff it avoids the zero set
    first = supports_through[0]
    for j, c in enumerate(supports_through):
        if c != first:
            return DesignCheckReport(1, False, counterexample=((0,), (j,)), blocks=b, coverage=(first, c), flag="dp")
    return DesignCheckReport(1, True, lam=first, blocks=b, flag="dp")


def _support_enumerate(E: CurveSpec, k: int, t: int, budget: int) -> DesignCheckReport:
    pg = point_group(E)
    n = len(pg.affine)
    if comb(n, k) > budget:
        raise ResourceError(f"C({n},{k}) = {comb(n, k)} subsets exceed the budget {budget}")
    table = addition_table(pg.group).tolist()
    idx = pg.star_indices
    everything = frozenset(range(n))
    supports = []
    for combo in combinations(range(n), k):
        s = 0
        for i in combo:
            s = table[s][idx[i]]
        if s == 0:
            supports.append(tuple(sorted(everything.difference(combo))))
    rep = check_blocks(n, n - k, supports, t, budget)
    return DesignCheckReport(
        rep.t, rep.is_t_design, rep.lam, rep.counterexample, "enumerate", rep.blocks, rep.coverage
    )


def check_support_design(
    E: CurveSpec, k: int, t: int, method: str = "auto", budget: int = SUBSET_BUDGET
) -> DesignCheckReport:
    """Whether the minimum-weight supports of the k-code form a t-design.

    Supports are the complements of the zero-sum k-subsets of ``E*``, reported
    as index sets in code coordinate order.  ``method`` is ``"dp"`` (t = 1
    only), ``"enumerate"``, ``"theorem"`` (sufficient condition through a
    (t+1)-design on the whole group) or ``"auto"`` (dp for t = 1, otherwise
    the theorem when it applies, else enumeration).  The report's ``flag``
    names the method used.
    """
    if classify_mds(E, k) is CodeClass.MDS:
        raise InapplicableError(f"k={k} gives an MDS code; it has no weight n-k codewords")
    n = len(point_group(E).affine)
    if not 1 <= t <= n - k:
        raise DomainError(f"t={t} outside 1..{n - k}")
    if method == "dp":
        if t != 1:
            raise DomainError("the dp method decides t = 1 only")
        return _support_dp(E, k, budget)
    if method == "enumerate":
        return _support_enumerate(E, k, t, budget)
    if method == "theorem":
        return _support_theorem(E, k, t)
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    if t == 1:
        return _support_dp(E, k, budget)
    try:
        return _support_theorem(E, k, t)
    except InapplicableError:
        return _support_enumerate(E, k, t, budget)


@dataclass(frozen=True)
class Certificate:
    zero_set: tuple[int, ...]
    support: tuple[int, ...]
    message: tuple[int, ...]
    codeword: tuple[int, ...]

    @property
    def weight(self) -> int:
        return len(self.support)


def certificate_codeword(E: CurveSpec, k: int) -> Certificate:
    """A weight ``n-k`` codeword vanishing exactly on a zero-sum k-subset.

    The message is a kernel vector of the k x k evaluation matrix at the zero
    set; the codeword is recomputed from the full generator matrix and checked.
    """
    code = build_code(E, k)
    pg = point_group(E)
    idx = pg.star_indices
    chosen = find_subset_with_sum(addition_table(pg.group).tolist(), idx, k, 0)
    if chosen is None:
        raise InapplicableError(f"k={k} gives an MDS code; no zero-sum k-subset exists")
    where = {g: i for i, g in enumerate(idx)}
    zero_set = tuple(sorted(where[g] for g in chosen))
    M = code.matrix()
    msg = kernel_vector(M[:, list(zero_set)].T, E.p)
    word = msg @ M % E.p
    zeros = tuple(int(i) for i in np.nonzero(word == 0)[0])
    if zeros != zero_set:
        raise InvariantViolation(f"certificate vanishes on {zeros}, expected {zero_set}")
    support = tuple(int(i) for i in np.nonzero(word)[0])
    return Certificate(zero_set, support, tuple(int(v) for v in msg), tuple(int(v) for v in word))
