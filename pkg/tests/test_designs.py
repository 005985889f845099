from math import comb, gcd

import pytest

from subsetdesigns.counting import count_subsets, count_subsets_star
from subsetdesigns.designs import (
    CyclicNecessity,
    DesignVerdict,
    check_1design_generic,
    check_1design_p_group,
    check_1design_pq,
    check_2design_elementary,
    cyclic_necessary_1design,
    decide_1design,
    gcd_equivalent,
    star_1design_dp,
    transfer_design,
)
from subsetdesigns.errors import DomainError, InapplicableError, InconsistentParametersError, InvariantViolation
from subsetdesigns.groups import GroupSpec, all_groups_of_order, eclass_representatives, element, element_index
from subsetdesigns.oracle import check_t_design, coverage_census, enumerate_blocks


def brute_1design(G):
    """{(k, x index): (is_design, lambda)} by counting blocks through every point."""
    tsubsets, cov = coverage_census(G, 1)
    out = {}
    for k in range(1, G.order + 1):
        for i in range(G.order):
            col = cov[:, k, i]
            blocks = count_subsets(G, k, element(G, *_coords(G, i)))
            design = blocks > 0 and (col == col[0]).all()
            out[k, i] = (bool(design), int(col[0]) if design else None)
    return out


def _coords(G, i):
    from subsetdesigns.groups import index_to_coords

    return index_to_coords(G, i)


def Z(*factors):
    return GroupSpec(factors)


# ---------------------------------------------------------------- examples


def test_generic_examples():
    G = Z(4)
    v = check_1design_generic(G, 2, element(G, 1))
    assert v.is_design and v.lam == 1 and v.blocks == 2
    G = Z(9)
    v = check_1design_generic(G, 3, G.identity)
    assert not v.is_design
    (y1, r1), (y2, r2) = v.witness
    assert {(y1.coords, r1), (y2.coords, r2)} == {((0,), 4), ((1,), 3)}
    G = Z(3, 3)
    v = check_1design_generic(G, 3, G.identity)
    assert v.is_design and v.lam == 4


def test_generic_edge_rules():
    G = Z(2, 2)
    assert check_1design_generic(G, 2, G.identity).rule == "empty-family"
    assert check_1design_generic(Z(5), 1, element(Z(5), 2)).rule == "singleton-blocks"
    assert not check_1design_generic(Z(5), 1, element(Z(5), 2)).is_design
    with pytest.raises(DomainError):
        check_1design_generic(Z(5), 6, element(Z(5), 0))


def test_p_group_examples():
    G = Z(9)
    v = check_1design_p_group(G, 3, element(G, 1))
    assert v.is_design and v.rule == "p-group:(ii)" and v.lam == 3
    assert not check_1design_p_group(G, 3, G.identity).is_design
    G = Z(3, 3)
    for _, x in eclass_representatives(G):
        v = check_1design_p_group(G, 3, x)
        assert v.is_design and v.rule == "p-group:(i)"
    with pytest.raises(DomainError):
        check_1design_p_group(Z(6), 2, element(Z(6), 1))


def test_pq_examples():
    G = Z(6)
    v = check_1design_pq(G, 2, element(G, 1))
    assert v.is_design and v.rule == "exp-pq:(iii)" and v.lam == 1
    assert not check_1design_pq(G, 2, element(G, 2)).is_design
    with pytest.raises(DomainError):
        check_1design_pq(Z(12), 2, element(Z(12), 1))


def test_pq_full_group_target_is_sum_of_two_torsion():
    # Z6 sums to 3, so B_6^0 is empty and B_6^3 = {Z6}
    G = Z(6)
    v0 = check_1design_pq(G, 6, G.identity)
    assert not v0.is_design and v0.rule == "exp-pq:empty-family"
    assert enumerate_blocks(G, 6, G.identity).blocks == ()
    v3 = check_1design_pq(G, 6, element(G, 3))
    assert v3.is_design and v3.rule == "exp-pq:(i)" and v3.lam == 1


def test_pq_printed_constants_disagree_with_brute_force():
    G = Z(2, 6)
    truth = brute_1design(G)
    for k in (4, 8):
        for x in (element(G, 0, 0), element(G, 0, 2)):
            printed = check_1design_pq(G, k, x, constants="printed")
            torsion = check_1design_pq(G, k, x)
            assert truth[k, element_index(G, x)][0] is True
            assert torsion.is_design and torsion.rule == "exp-pq:(iv)"
            assert not printed.is_design


def test_pq_clause_iii_sign_condition():
    G = Z(6)
    assert not check_1design_pq(G, 4, element(G, 1)).is_design
    assert not brute_1design(G)[4, 1][0]


def test_p_group_printed_zero_valuation_breaks_at_order_32():
    G = Z(2, 16)
    with pytest.raises(InvariantViolation):
        check_1design_p_group(G, 8, G.identity, zero_valuation="printed")
    v = check_1design_p_group(G, 8, G.identity, zero_valuation="infinity")
    assert not v.is_design
    assert not check_1design_generic(G, 8, G.identity).is_design


def test_2design_examples():
    G = Z(3, 3)
    v = check_2design_elementary(G, 3, G.identity)
    assert v.is_design and v.lam == 1 and v.blocks == 12
    assert not check_2design_elementary(G, 3, element(G, 1, 0)).is_design
    H = Z(2, 2, 2)
    v = check_2design_elementary(H, 4, H.identity)
    assert v.is_design
    rep = check_t_design(enumerate_blocks(H, 4, H.identity), 2)
    assert rep.is_t_design and rep.lam == v.lam
    with pytest.raises(DomainError):
        check_2design_elementary(Z(9), 3, Z(9).identity)


def test_cyclic_necessary():
    assert cyclic_necessary_1design(4, 3) is CyclicNecessity.RULED_OUT
    assert not check_1design_generic(Z(4), 3, Z(4).identity).is_design
    assert cyclic_necessary_1design(6, 2) is CyclicNecessity.UNDECIDED
    # 12 > 3^2 - 1, so the necessary condition does not apply
    assert cyclic_necessary_1design(12, 5) is CyclicNecessity.UNDECIDED


def test_cyclic_necessary_is_sound():
    for n in range(2, 21):
        G = Z(n)
        for k in range(1, n + 1):
            if cyclic_necessary_1design(n, k) is CyclicNecessity.RULED_OUT:
                for _, x in eclass_representatives(G):
                    assert not check_1design_generic(G, k, x).is_design


def test_gcd_equivalent():
    assert gcd_equivalent(12, 2, 10)
    assert not gcd_equivalent(12, 2, 3)
    assert gcd_equivalent(12, 0, 0)


def test_verdict_invariant():
    with pytest.raises(DomainError):
        DesignVerdict(True, 1, 4, 2, "x")
    with pytest.raises(InconsistentParametersError):
        DesignVerdict(True, 1, 4, 2, "x", lam=2, blocks=2)


def test_transfer_examples():
    G = Z(3, 3)
    full2 = check_2design_elementary(G, 3, G.identity)
    rep = transfer_design(G, 3, G.identity, 2, full2)
    assert [(c.structure, c.t) for c in rep.conclusions] == [("star", 1)]
    star = star_1design_dp(G, 3, G.identity)
    assert star.is_design and star.lam == 3 and star.blocks == 8
    full1 = check_1design_generic(G, 3, G.identity)
    rep = transfer_design(G, 3, G.identity, 2, full1, star)
    assert ("full", 2) in [(c.structure, c.t) for c in rep.conclusions]
    with pytest.raises(InapplicableError):
        transfer_design(G, 2, G.identity, 2, check_1design_generic(G, 2, G.identity))


# ---------------------------------------------------------------- exhaustive agreement


P_GROUPS_SMALL = [G for n in (2, 3, 4, 5, 7, 8, 9, 16) for G in all_groups_of_order(n)]


@pytest.mark.parametrize("G", P_GROUPS_SMALL, ids=str)
def test_p_group_checker_agrees(G):
    truth = brute_1design(G)
    for k in range(1, G.order + 1):
        for _, x in eclass_representatives(G):
            want = truth[k, element_index(G, x)]
            for v in (check_1design_p_group(G, k, x, zero_valuation="infinity"), check_1design_generic(G, k, x)):
                assert (v.is_design, v.lam) == want, (k, x, v)
            assert check_1design_p_group(G, k, x).is_design == want[0]


PQ_GROUPS = [Z(6), Z(2, 6), Z(15), Z(3, 6), Z(10), Z(14)]  # Z2+Z2+Z6 runs in the acceptance suite


@pytest.mark.parametrize("G", PQ_GROUPS, ids=str)
def test_pq_checker_agrees(G):
    truth = brute_1design(G)
    for k in range(1, G.order + 1):
        for _, x in eclass_representatives(G):
            want = truth[k, element_index(G, x)]
            for v in (check_1design_pq(G, k, x), check_1design_generic(G, k, x), decide_1design(G, k, x)):
                assert (v.is_design, v.lam) == want, (k, x, v)


def test_pq_checker_agrees_with_generic_on_larger_groups():
    for G in (Z(21), Z(33), Z(3, 15), Z(2, 2, 2, 6), Z(5, 10), Z(35)):
        for k in range(1, G.order + 1):
            for _, x in eclass_representatives(G):
                assert check_1design_pq(G, k, x).is_design == check_1design_generic(G, k, x).is_design


def test_gcd_equivalence_property():
    for n in range(2, 21):
        G = Z(n)
        for k in range(1, n + 1):
            by_gcd = {}
            for x in range(n):
                v = check_1design_generic(G, k, element(G, x)).is_design
                assert by_gcd.setdefault(gcd(x, n), v) == v


def test_replication_identity():
    for n in range(2, 25):
        for G in all_groups_of_order(n):
            for k in range(1, n + 1):
                for _, x in eclass_representatives(G):
                    v = decide_1design(G, k, x)
                    if v.is_design:
                        assert v.lam * n == v.blocks * k


def test_star_dp_matches_enumeration():
    for G in (Z(9), Z(3, 3), Z(2, 4), Z(10)):
        for k in range(1, G.order):
            for _, x in eclass_representatives(G):
                dp = star_1design_dp(G, k, x)
                rep = check_t_design(enumerate_blocks(G, k, x, star=True), 1)
                assert (dp.is_design, dp.lam) == (rep.is_t_design, rep.lam)
                assert dp.blocks == count_subsets_star(G, k, x)
