from math import factorial

import pytest
from hypothesis import given

from cliquefactor.constructions import complete_partite, extremal_fractional
from cliquefactor.exact import (BudgetExhausted, CountCapExceeded, Matching, count_perfect_factors,
                                find_almost_factor, find_perfect_factor, perfect_matching,
                                verify_matching)

from oracles import brute_cliques, brute_factors, brute_max_matching, partite_hosts


@pytest.mark.parametrize("t,k,n", [(3, 2, 2), (3, 2, 3), (4, 3, 2), (2, 2, 4)])
def test_complete_factor_counts(t, k, n):
    # each factor is fixed by t-1 independent permutations of the classes
    assert count_perfect_factors(complete_partite(t, k, n)) == factorial(n) ** (t - 1)


def test_extremal_has_no_factor():
    assert find_perfect_factor(extremal_fractional(3, 2, 3)) is None


def test_found_factor_verifies():
    H = complete_partite(3, 2, 4)
    M = find_perfect_factor(H)
    assert M.size == 4 and verify_matching(H, M, perfect=True).ok


def test_budget_and_cap():
    H = complete_partite(3, 2, 4)
    with pytest.raises(BudgetExhausted):
        count_perfect_factors(H, budget=10)
    with pytest.raises(CountCapExceeded) as info:
        count_perfect_factors(H, cap=3)
    assert info.value.lower_bound == 4


def test_verify_matching_detects_problems():
    H = complete_partite(3, 2, 2)
    c = H.cliques[0]
    assert not verify_matching(H, Matching((c, c))).ok
    assert not verify_matching(H, Matching((c,)), perfect=True).ok
    assert not verify_matching(H, Matching((((0, 0), (1, 0)),))).ok


def test_matching_helpers():
    a = Matching((((1, 0), (0, 0)),))
    assert a.cliques == (((0, 0), (1, 0)),)
    assert (a + Matching((((0, 1), (1, 1)),))).size == 2
    assert a.relabel({(0, 0): (0, 5), (1, 0): (1, 5)}).cliques == (((0, 5), (1, 5)),)


def test_almost_factor_on_extremal():
    H = extremal_fractional(3, 2, 3)
    # every triangle uses two of the three position-0 vertices, so any two meet
    res = find_almost_factor(H, max_uncovered=3)
    assert res.optimal and res.matching.size == 1 and not res.within_target
    assert find_almost_factor(H, max_uncovered=6).within_target
    with pytest.raises(ValueError):
        find_almost_factor(H, max_uncovered=2)


def test_within():
    H = complete_partite(3, 2, 3)
    keep = [(c, p) for c in range(3) for p in range(2)]
    M = find_perfect_factor(H, within=keep)
    assert M.vertices() == set(keep)


def test_perfect_matching_on_plain_family():
    verts = [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert perfect_matching(verts, [((0, 0), (1, 1)), ((0, 1), (1, 0))]).size == 2
    assert perfect_matching(verts, [((0, 0), (1, 1)), ((0, 1), (1, 1))]) is None


@given(partite_hosts(t_max=3, n_max=3))
def test_count_matches_brute_force(H):
    assert count_perfect_factors(H) == brute_factors(H)


@given(partite_hosts(t_max=3, n_max=3))
def test_existence_matches_brute_force(H):
    M = find_perfect_factor(H)
    assert (M is not None) == (brute_factors(H) > 0)
    if M is not None:
        assert verify_matching(H, M, perfect=True).ok


@given(partite_hosts(t_max=3, n_max=3))
def test_maximum_matching_matches_brute_force(H):
    res = find_almost_factor(H)
    cl = brute_cliques(H)
    best = brute_max_matching(H.vertices(), cl) if cl else 0
    assert res.optimal and res.matching.size == best
    assert verify_matching(H, res.matching).ok
