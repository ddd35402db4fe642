from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from cliquefactor.absorption import (AbsorbingFamily, AbsorptionConfig, AbsorptionFailure,
                                     FamilyRetriesExhausted, absorb_leftover,
                                     absorbing_matchings, build_absorbing_family,
                                     find_absorbing_sets, is_absorbing, asymptotic_selection_prob,
                                     split_leftover)
from cliquefactor.constructions import (GeneratorSpec, complete_partite, extremal_fractional,
                                        random_with_min_codegree)
from cliquefactor.exact import verify_matching

from oracles import brute_cliques, partite_hosts


def brute_is_absorbing(H, A, T):
    """Both A and A ∪ T split into disjoint cliques, checked by listing cliques."""
    if set(A) & set(T):
        return False

    def splits(S):
        S = set(S)
        if not S:
            return True
        v = min(S)
        return any(splits(S - set(c)) for c in brute_cliques(H) if v in c and set(c) <= S)

    return splits(A) and splits(set(A) | set(T))


def all_balanced_m_sets(H, avoid):
    t = H.t
    per_class = [[v for v in H.vertices() if v[0] == c and v not in avoid] for c in range(t)]
    for parts in product(*[combinations(p, t - 1) for p in per_class]):
        yield tuple(sorted(v for part in parts for v in part))


def test_complete_host_counts():
    H = complete_partite(3, 2, 4)
    T = ((0, 0), (1, 0), (2, 0))
    found = find_absorbing_sets(H, T)
    oracle = [A for A in all_balanced_m_sets(H, set(T)) if brute_is_absorbing(H, A, T)]
    # 3 remaining vertices per class, choose 2 in each: 27 candidates, all absorbing
    assert len(found) == len(oracle) == 27


def test_shape_checks():
    H = complete_partite(3, 2, 4)
    with pytest.raises(ValueError):
        is_absorbing(H, [(0, 1)], [(0, 0), (1, 0), (2, 0)])
    A = ((0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2))
    with pytest.raises(ValueError):
        is_absorbing(H, A, [(0, 0), (1, 0)])
    assert not is_absorbing(H, A, [(0, 1), (1, 0), (2, 0)])


@given(partite_hosts(t_max=3, n_max=3, k=2), st.data())
@settings(max_examples=40)
def test_is_absorbing_matches_definition(H, data):
    if H.t != 3 or H.n < 3:
        return
    T = tuple((c, data.draw(st.integers(0, H.n - 1))) for c in range(3))
    A = data.draw(st.sampled_from(list(all_balanced_m_sets(H, set()))))
    assert is_absorbing(H, A, T) == brute_is_absorbing(H, A, T)
    res = absorbing_matchings(H, A, T)
    if res is not None:
        assert verify_matching(H, res[0], perfect=True, on=A).ok
        assert verify_matching(H, res[1], perfect=True, on=set(A) | set(T)).ok


@given(partite_hosts(t_max=3, n_max=4, k=2), st.integers(0, 100))
@settings(max_examples=30)
def test_sampled_sets_are_absorbing(H, seed):
    if H.t != 3 or H.n < 3:
        return
    T = ((0, 0), (1, 0), (2, 0))
    exhaustive = set(find_absorbing_sets(H, T))
    sampled = find_absorbing_sets(H, T, sample_budget=10, seed=seed)
    assert set(sampled) <= exhaustive


def test_split_leftover():
    W = [(0, 3), (1, 1), (0, 1), (1, 0)]
    assert split_leftover(W, 2) == [((0, 1), (1, 0)), ((0, 3), (1, 1))]
    with pytest.raises(ValueError):
        split_leftover([(0, 0)], 2)


def test_selection_probability_is_tiny():
    p = asymptotic_selection_prob(0.1, 3, 60)
    assert 0 < p < 1e-10


def test_empty_family_for_zero_budget():
    H = complete_partite(3, 2, 4)
    fam = build_absorbing_family(H, AbsorptionConfig(family_size_budget=0))
    assert fam.members == [] and fam.U == set()
    with pytest.raises(ValueError):
        build_absorbing_family(H, AbsorptionConfig(family_size_budget=0, leftover_capacity=3))


def test_config_validation():
    with pytest.raises(ValueError):
        AbsorptionConfig(gamma=0)
    with pytest.raises(ValueError):
        AbsorptionConfig(selection_prob=2)


def test_family_is_disjoint_and_absorbs():
    H, _ = random_with_min_codegree(GeneratorSpec(3, 2, 30, "minCodegreeTarget",
                                                  target=27, seed=5))
    fam = build_absorbing_family(H, AbsorptionConfig(leftover_capacity=6, seed=5))
    seen = [v for A in fam.members for v in A]
    assert len(seen) == len(set(seen)) and len(fam.members) >= 2
    assert fam.audit["min"] >= 1
    rest = sorted(v for v in H.vertices() if v not in fam.U)
    W = [next(v for v in rest if v[0] == c) for c in range(3)]
    M = absorb_leftover(H, fam, W)
    assert verify_matching(H, M, perfect=True, on=fam.U | set(W)).ok


def test_family_fails_without_cliques():
    H = extremal_fractional(3, 2, 3)
    with pytest.raises(FamilyRetriesExhausted) as info:
        build_absorbing_family(H, AbsorptionConfig(leftover_capacity=3, max_retries=3))
    assert len(info.value.diagnostics) == 3


def test_absorb_leftover_guards():
    H = complete_partite(3, 2, 4)
    A = ((0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2))
    fam = AbsorbingFamily(3, [A], [absorbing_matchings(H, A, ((0, 0), (1, 0), (2, 0)))[0]], 3)
    with pytest.raises(ValueError):
        absorb_leftover(H, fam, [(0, 1), (1, 0), (2, 0)])
    with pytest.raises(ValueError):
        absorb_leftover(H, fam, [(0, 0), (1, 0), (2, 0), (0, 3), (1, 3), (2, 3)])
    M = absorb_leftover(H, fam, [(0, 3), (1, 3), (2, 3)])
    assert M.size == 3


def test_absorb_leftover_failure():
    H = extremal_fractional(3, 2, 3)
    A = ((0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2))
    fam = AbsorbingFamily(3, [A], [], 3)
    with pytest.raises(AbsorptionFailure):
        absorb_leftover(H, fam, [(0, 0), (1, 0), (2, 0)], exact_fallback=True)
