from math import gcd, lcm, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsetdesigns.errors import DomainError, InvalidSpecError, ResourceError
from subsetdesigns.groups import (
    INFINITY,
    GroupElement,
    GroupSpec,
    add,
    all_groups_of_order,
    canonicalize,
    divisors,
    e_of,
    element,
    element_index,
    element_order,
    enumerate_elements,
    eclass_representatives,
    mobius,
    neg,
    p_valuation,
    scalar_mul,
    sum_of_two_torsion,
    torsion_count,
)


def _order_census(factors):
    """Multiset of element orders of a direct sum of cyclic groups, by enumeration."""
    from collections import Counter
    from itertools import product

    return Counter(lcm(*(n // gcd(c, n) for c, n in zip(cs, factors))) for cs in product(*map(range, factors)))


@pytest.mark.parametrize(
    "factors, expected",
    [([2, 4], (2, 4)), ([2, 3], (6,)), ([4, 6], (2, 12)), ([1], (1,)), ([1, 1, 5], (5,)), ([3, 9, 2], (3, 18))],
)
def test_canonicalize(factors, expected):
    assert canonicalize(factors) == expected
    assert _order_census(factors) == _order_census(expected)


@pytest.mark.parametrize("bad", [[0], [2, -1], []])
def test_canonicalize_rejects(bad):
    with pytest.raises(InvalidSpecError):
        canonicalize(bad)


def test_groupspec_basics():
    G = GroupSpec.parse("4,6")
    assert G.factors == (2, 12) and G.order == 24 and G.exponent == 12 and G.rank == 2
    assert str(G) == "Z2 + Z12" and G.text() == "2,12"
    assert GroupSpec((1,)).order == 1 and GroupSpec((1,)).identity.coords == (0,)
    assert GroupSpec((3, 3)).is_elementary() and GroupSpec((3, 3)).prime == 3
    assert not GroupSpec((6,)).is_p_group()


def test_arithmetic_examples():
    Z4 = GroupSpec((4,))
    assert add(Z4, element(Z4, 3), element(Z4, 2)).coords == (1,)
    G = GroupSpec((2, 4))
    assert scalar_mul(G, 2, element(G, 1, 3)).coords == (0, 2)
    Z6 = GroupSpec((6,))
    assert scalar_mul(Z6, -1, element(Z6, 4)).coords == (2,)
    assert neg(Z6, element(Z6, 4)) == element(Z6, 2)


def test_mismatched_groups():
    with pytest.raises(DomainError):
        add(GroupSpec((4,)), element(GroupSpec((4,)), 1), element(GroupSpec((2, 2)), 1, 0))


@pytest.mark.parametrize("factors, d, expected", [((9,), 3, 3), ((2, 4), 2, 4), ((2, 4), 1, 1), ((5, 25), 5, 25)])
def test_torsion_count(factors, d, expected):
    assert torsion_count(GroupSpec(factors), d) == expected


def test_torsion_count_domain():
    with pytest.raises(DomainError):
        torsion_count(GroupSpec((4,)), 0)


@pytest.mark.parametrize("factors, x, expected", [((4,), (2,), 2), ((9,), (0,), 9), ((2, 4), (1, 2), 1), ((3, 9), (0, 3), 3)])
def test_e_of(factors, x, expected):
    G = GroupSpec(factors)
    assert e_of(G, element(G, x)) == expected


def test_e_of_by_enumerating_dG():
    for n in range(1, 25):
        for G in all_groups_of_order(n):
            elems = list(enumerate_elements(G))
            for d in divisors(G.exponent):
                dG = {scalar_mul(G, d, g) for g in elems}
                for x in elems:
                    e = e_of(G, x)
                    assert G.exponent % e == 0
                    if x in dG:
                        assert d <= e
                    if d == e:
                        assert x in dG


@pytest.mark.parametrize("n, expected", [(1, 1), (6, 1), (12, 0), (2, -1), (30, -1)])
def test_mobius(n, expected):
    assert mobius(n) == expected


def test_mobius_domain_and_multiplicativity():
    with pytest.raises(DomainError):
        mobius(0)
    for a in range(1, 201):
        for b in range(1, 201):
            if gcd(a, b) == 1:
                assert mobius(a * b) == mobius(a) * mobius(b)


def test_p_valuation():
    assert p_valuation(12, 2) == 2
    assert p_valuation(0, 5) is INFINITY
    assert p_valuation(7, 3) == 0
    with pytest.raises(DomainError):
        p_valuation(8, 4)


def test_enumerate_elements():
    G = GroupSpec((2, 2))
    assert [x.coords for x in enumerate_elements(G)] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [x.coords for x in enumerate_elements(GroupSpec((3,)))] == [(0,), (1,), (2,)]
    assert [x.coords for x in enumerate_elements(GroupSpec((1,)))] == [(0,)]
    with pytest.raises(ResourceError):
        next(enumerate_elements(GroupSpec((10, 10)), budget=50))


def test_torsion_count_exhaustive():
    for n in range(1, 101):
        for G in all_groups_of_order(n):
            elems = list(enumerate_elements(G))
            for d in range(1, G.exponent + 1):
                assert torsion_count(G, d) == sum(scalar_mul(G, d, g).is_identity() for g in elems)


def test_element_order_kills():
    for G in all_groups_of_order(24) + all_groups_of_order(36):
        for g in enumerate_elements(G):
            assert scalar_mul(G, element_order(G, g), g).is_identity()


def test_group_counts():
    # number of abelian groups of order n for n = 1..20
    expected = [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5, 1, 2, 1, 2]
    assert [len(all_groups_of_order(n)) for n in range(1, 21)] == expected


def test_sum_of_two_torsion():
    assert sum_of_two_torsion(GroupSpec((4,))).coords == (2,)
    assert sum_of_two_torsion(GroupSpec((2, 2))).coords == (0, 0)
    assert sum_of_two_torsion(GroupSpec((6,))).coords == (3,)
    assert sum_of_two_torsion(GroupSpec((9,))).coords == (0,)


def test_eclass_representatives_are_first_in_order():
    G = GroupSpec((4,))
    assert [(e, x.coords) for e, x in eclass_representatives(G)] == [(4, (0,)), (1, (1,)), (2, (2,))]


factors_st = st.lists(st.integers(1, 12), min_size=1, max_size=3)


@given(factors_st)
def test_canonicalize_properties(factors):
    c = canonicalize(factors)
    assert prod(c) == prod(factors)
    assert canonicalize(c) == c
    assert all(c[i + 1] % c[i] == 0 for i in range(len(c) - 1))


@settings(max_examples=200)
@given(factors_st, st.data())
def test_group_axioms(factors, data):
    G = GroupSpec(factors)
    pick = lambda: element(G, tuple(data.draw(st.integers(0, n - 1)) for n in G.factors))
    a, b, c = pick(), pick(), pick()
    assert add(G, add(G, a, b), c) == add(G, a, add(G, b, c))
    assert add(G, a, b) == add(G, b, a)
    assert add(G, a, neg(G, a)).is_identity()
    k = data.draw(st.integers(-20, 20))
    acc = G.identity
    for _ in range(abs(k)):
        acc = add(G, acc, a)
    assert scalar_mul(G, k, a) == (acc if k >= 0 else neg(G, acc))
    assert isinstance(a, GroupElement) and 0 <= element_index(G, a) < G.order
