"""Instance generators: complete, extremal and random partite k-graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, product
from math import ceil, comb
from typing import Iterator

import numpy as np

from .core import Edge, GeneralHypergraph, PartiteHypergraph, min_codegree
from .rng import stream

log = logging.getLogger(__name__)

MAX_LEGAL_SETS = 5_000_000
MODES = ("complete", "extremal", "uniformRandom", "minCodegreeTarget")


class RetriesExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    t: int
    k: int
    n: int
    mode: str = "complete"
    edge_prob: float | None = None
    target: int | None = None
    seed: int = 0
    margin: float = 0.05
    max_retries: int = 10

    def __post_init__(self):
        if not 2 <= self.k <= self.t:
            raise ValueError(f"need 2 <= k <= t, got k={self.k}, t={self.t}")
        if self.n < 1:
            raise ValueError("class size n must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if self.edge_prob is not None and not 0 <= self.edge_prob <= 1:
            raise ValueError("edge probability must lie in [0, 1]")
        if self.mode == "uniformRandom" and self.edge_prob is None:
            raise ValueError("uniformRandom needs edge_prob")
        if self.mode == "minCodegreeTarget" and self.target is None:
            raise ValueError("minCodegreeTarget needs target")


def legal_k_sets(t: int, k: int, n: int) -> Iterator[Edge]:
    """Every legal k-set of the balanced vertex set, lexicographically."""
    for I in combinations(range(t), k):
        for pos in product(range(n), repeat=k):
            yield tuple(zip(I, pos))


def _check_size(t: int, k: int, n: int) -> int:
    count = comb(t, k) * n ** k
    if count > MAX_LEGAL_SETS:
        raise ValueError(f"{count} legal {k}-sets exceeds the cap {MAX_LEGAL_SETS}")
    return count


def complete_partite(t: int, k: int, n: int) -> PartiteHypergraph:
    if not 2 <= k <= t:
        raise ValueError(f"need 2 <= k <= t, got k={k}, t={t}")
    _check_size(t, k, n)
    return PartiteHypergraph(t, k, [n] * t, legal_k_sets(t, k, n))


def extremal_size(t: int, k: int, n: int) -> int:
    """Size of each set W_i: ceil((t-k+1)n/t) - 1."""
    return ceil((t - k + 1) * n / t) - 1


def extremal_fractional(t: int, k: int, n: int) -> PartiteHypergraph:
    """Balanced instance with codegree ceil((t-k+1)n/t)-1 and no perfect fractional factor.

    W_i is the prefix of class i of that size; the edges are exactly the legal
    k-sets meeting some W_i.
    """
    if not 2 <= k <= t or n < 1:
        raise ValueError(f"invalid parameters t={t}, k={k}, n={n}")
    w = extremal_size(t, k, n)
    if w + 1 < 1:
        raise ValueError("ceil((t-k+1)n/t) must be at least 1")
    _check_size(t, k, n)
    return PartiteHypergraph(t, k, [n] * t,
                             (e for e in legal_k_sets(t, k, n) if any(p < w for _, p in e)))


def random_partite(spec: GeneratorSpec) -> PartiteHypergraph:
    """Each legal k-set kept independently with probability ``spec.edge_prob``."""
    p = spec.edge_prob if spec.edge_prob is not None else 0.5
    count = _check_size(spec.t, spec.k, spec.n)
    draws = stream(spec.seed, "random_partite").random(count)
    edges = [e for e, u in zip(legal_k_sets(spec.t, spec.k, spec.n), draws) if u < p]
    return PartiteHypergraph(spec.t, spec.k, [spec.n] * spec.t, edges)


def random_with_min_codegree(spec: GeneratorSpec) -> tuple[PartiteHypergraph, int]:
    """Random instance with minimum (k-1)-codegree at least ``spec.target``.

    Draws a uniform instance at density target/n + margin, then repairs each
    deficient (T, j) by adding its smallest missing completions.  Returns the
    instance and the number of edges added.
    """
    t, k, n, target = spec.t, spec.k, spec.n, spec.target
    if target is None or not 0 <= target <= n:
        raise ValueError(f"target codegree must lie in [0, {n}]")
    p = min(1.0, target / n + spec.margin)
    base = random_partite(GeneratorSpec(t, k, n, "uniformRandom", edge_prob=p, seed=spec.seed))
    if target == 0:
        return base, 0
    edges = set(base.edges)
    nbr: dict[Edge, list[int]] = {}
    for e in edges:
        for i, v in enumerate(e):
            rest = e[:i] + e[i + 1:]
            nbr.setdefault(rest, [0] * t)[v[0]] |= 1 << v[1]
    repairs = 0
    # adding edges only raises codegrees: the first sweep repairs, the second confirms
    for _ in range(spec.max_retries):
        added = 0
        for I in combinations(range(t), k - 1):
            for pos in product(range(n), repeat=k - 1):
                T = tuple(zip(I, pos))
                masks = nbr.setdefault(T, [0] * t)
                for j in range(t):
                    if j in I:
                        continue
                    have = masks[j].bit_count()
                    q = 0
                    while have < target:
                        if not masks[j] >> q & 1:
                            e = tuple(sorted(T + ((j, q),)))
                            edges.add(e)
                            for i, v in enumerate(e):
                                rest = e[:i] + e[i + 1:]
                                nbr.setdefault(rest, [0] * t)[v[0]] |= 1 << v[1]
                            added += 1
                            have += 1
                        q += 1
        repairs += added
        if added == 0:
            break
    else:
        raise RetriesExhausted(f"repair still adding edges after {spec.max_retries} sweeps")
    H = PartiteHypergraph(t, k, [n] * t, edges)
    if min_codegree(H).value < target:
        raise RetriesExhausted(f"repair did not reach codegree {target}")
    log.debug("random_with_min_codegree: %d repairs", repairs)
    return H, repairs


def generate(spec: GeneratorSpec) -> tuple[PartiteHypergraph, dict]:
    """Dispatch on ``spec.mode``; returns the instance and generation info."""
    info: dict = {"mode": spec.mode}
    if spec.mode == "complete":
        H = complete_partite(spec.t, spec.k, spec.n)
    elif spec.mode == "extremal":
        H = extremal_fractional(spec.t, spec.k, spec.n)
        info["wSize"] = extremal_size(spec.t, spec.k, spec.n)
    elif spec.mode == "uniformRandom":
        H = random_partite(spec)
    else:
        H, info["repairs"] = random_with_min_codegree(spec)
    return H, info


def random_general_with_min_codegree(n: int, k: int, target: int, seed: int,
                                     margin: float = 0.05) -> GeneralHypergraph:
    """Random k-graph on n vertices with every (k-1)-set of degree >= target."""
    if not 0 <= target <= n - k + 1:
        raise ValueError(f"target must lie in [0, {n - k + 1}]")
    p = min(1.0, target / max(1, n - k + 1) + margin)
    all_sets = list(combinations(range(n), k))
    draws = stream(seed, "random_general").random(len(all_sets))
    edges = {e for e, u in zip(all_sets, draws) if u < p}
    for T in combinations(range(n), k - 1):
        Ts = set(T)
        have = [v for v in range(n) if v not in Ts and tuple(sorted(T + (v,))) in edges]
        missing = (v for v in range(n) if v not in Ts and v not in have)
        for _ in range(target - len(have)):
            edges.add(tuple(sorted(T + (next(missing),))))
    return GeneralHypergraph(n, k, edges)


def random_near_regular_tgraph(t: int, n: int, D: int, max_pair: int = 2,
                               seed: int = 0, max_tries: int = 1000):
    """Union of D random perfect t-partite matchings with pair degrees <= max_pair.

    Every vertex has degree exactly D.  Each layer is redrawn until adding it
    keeps all pair degrees within ``max_pair`` and repeats no edge.
    """
    from .core import TGraph

    rng = stream(seed, "near_regular_tgraph")
    edges: set[Edge] = set()
    pairs: dict[tuple, int] = {}
    for layer in range(D):
        for _ in range(max_tries):
            perms = [np.arange(n)] + [rng.permutation(n) for _ in range(t - 1)]
            layer_edges = [tuple((c, int(perms[c][j])) for c in range(t)) for j in range(n)]
            if any(e in edges for e in layer_edges):
                continue
            new = [pr for e in layer_edges for pr in combinations(e, 2)]
            if all(pairs.get(pr, 0) + 1 <= max_pair for pr in new):
                break
        else:
            raise RetriesExhausted(f"layer {layer}: pair degree bound {max_pair} unreachable")
        edges.update(layer_edges)
        for pr in new:
            pairs[pr] = pairs.get(pr, 0) + 1
    return TGraph(t, [n] * t, frozenset(edges))
