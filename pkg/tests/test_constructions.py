from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from cliquefactor.constructions import (GeneratorSpec, RetriesExhausted, complete_partite,
                                        extremal_fractional, extremal_size, generate,
                                        legal_k_sets, random_general_with_min_codegree,
                                        random_near_regular_tgraph, random_partite,
                                        random_with_min_codegree)
from cliquefactor.core import min_codegree

from oracles import brute_min_codegree


def test_legal_sets_count():
    assert len(list(legal_k_sets(4, 3, 2))) == 4 * 8


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec(3, 4, 2)
    with pytest.raises(ValueError):
        GeneratorSpec(3, 2, 2, mode="uniformRandom")
    with pytest.raises(ValueError):
        GeneratorSpec(3, 2, 2, mode="minCodegreeTarget")
    with pytest.raises(ValueError):
        GeneratorSpec(3, 2, 2, mode="nope")


def test_size_cap():
    with pytest.raises(ValueError, match="exceeds the cap"):
        complete_partite(10, 5, 40)


@pytest.mark.parametrize("t,k,n,w", [(3, 2, 3, 1), (3, 2, 6, 3), (4, 2, 4, 2), (4, 3, 4, 1)])
def test_extremal_codegree(t, k, n, w):
    # W_i size ceil((t-k+1)n/t) - 1, which is also the minimum codegree
    assert extremal_size(t, k, n) == w
    H = extremal_fractional(t, k, n)
    assert min_codegree(H).value == w == brute_min_codegree(H)


def test_random_partite_is_seeded():
    s = GeneratorSpec(3, 2, 4, "uniformRandom", edge_prob=0.5, seed=9)
    assert random_partite(s) == random_partite(s)
    assert random_partite(s) != random_partite(GeneratorSpec(3, 2, 4, "uniformRandom",
                                                             edge_prob=0.5, seed=10))


def test_probability_extremes():
    assert len(random_partite(GeneratorSpec(3, 2, 3, "uniformRandom", edge_prob=0.0)).edges) == 0
    assert random_partite(GeneratorSpec(3, 2, 3, "uniformRandom", edge_prob=1.0)) == \
        complete_partite(3, 2, 3)


@given(st.integers(2, 4), st.integers(1, 5), st.integers(0, 2**20), st.data())
@settings(max_examples=40)
def test_min_codegree_target_is_met(t, n, seed, data):
    k = data.draw(st.integers(2, min(t, 3)))
    target = data.draw(st.integers(0, n))
    H, repairs = random_with_min_codegree(GeneratorSpec(t, k, n, "minCodegreeTarget",
                                                        target=target, seed=seed))
    assert min_codegree(H).value >= target and repairs >= 0


def test_generate_dispatch():
    H, info = generate(GeneratorSpec(3, 2, 3, "extremal"))
    assert info == {"mode": "extremal", "wSize": 1}
    H, info = generate(GeneratorSpec(3, 2, 3, "minCodegreeTarget", target=2, seed=1))
    assert "repairs" in info


def test_near_regular_tgraph():
    G = random_near_regular_tgraph(3, 30, 6, max_pair=2, seed=1)
    deg = {v: 0 for v in G.vertices()}
    pairs = {}
    for e in G.edges:
        for v in e:
            deg[v] += 1
        for p in combinations(e, 2):
            pairs[p] = pairs.get(p, 0) + 1
    assert set(deg.values()) == {6} and max(pairs.values()) <= 2


def test_near_regular_impossible():
    with pytest.raises(RetriesExhausted):
        random_near_regular_tgraph(3, 2, 5, max_pair=1, seed=0, max_tries=20)


def test_general_min_degree():
    G = random_general_with_min_codegree(10, 3, 6, seed=2)
    assert G.min_degree(2) >= 6
