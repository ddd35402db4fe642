"""Absorbing m-sets (m = t(t-1)), absorbing families and leftover absorption.

An m-set A is absorbing for a balanced t-set T when A and T are disjoint and
both A and A ∪ T span perfect matchings of the auxiliary clique t-graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import ceil, comb
from typing import Iterable, Sequence

import numpy as np

from .core import Edge, PartiteHypergraph, Vertex, enumerate_cliques
from .exact import Matching, perfect_matching
from .rng import stream

log = logging.getLogger(__name__)


class AbsorptionFailure(RuntimeError):
    pass


class FamilyRetriesExhausted(RuntimeError):
    def __init__(self, msg: str, diagnostics: list[str]):
        super().__init__(msg)
        self.diagnostics = diagnostics


@dataclass
class AbsorptionConfig:
    gamma: float = 0.1
    selection_prob: float | None = None
    family_size_budget: int | None = None
    leftover_capacity: int = 0
    max_retries: int = 50
    audit_size: int = 20
    exact_fallback: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.selection_prob is not None and not 0 <= self.selection_prob <= 1:
            raise ValueError("selection probability must lie in [0, 1]")
        if self.leftover_capacity < 0 or (self.family_size_budget or 0) < 0:
            raise ValueError("budgets must be nonnegative")


@dataclass
class AbsorbingFamily:
    t: int
    members: list[Edge]
    matchings: list[Matching]
    leftover_capacity: int = 0
    audit: dict = field(default_factory=dict)
    attempts: int = 0

    @property
    def U(self) -> set[Vertex]:
        return {v for A in self.members for v in A}


def _balanced_counts(S: Sequence[Vertex], t: int) -> list[int]:
    counts = [0] * t
    for c, _ in S:
        counts[c] += 1
    return counts


def _check_shapes(t: int, A: Sequence[Vertex], T: Sequence[Vertex]) -> None:
    if len(set(A)) != len(A) or _balanced_counts(A, t) != [t - 1] * t:
        raise ValueError(f"A must be a balanced {t * (t - 1)}-set")
    if len(set(T)) != len(T) or _balanced_counts(T, t) != [1] * t:
        raise ValueError(f"T must be a balanced {t}-set")


def absorbing_matchings(H: PartiteHypergraph, A: Sequence[Vertex],
                        T: Sequence[Vertex]) -> tuple[Matching, Matching] | None:
    """Perfect matchings of H'[A] and H'[A ∪ T], or None if A does not absorb T."""
    _check_shapes(H.t, A, T)
    if set(A) & set(T):
        return None
    inner = perfect_matching(sorted(A), enumerate_cliques(H, within=A))
    if inner is None:
        return None
    both = sorted(set(A) | set(T))
    outer = perfect_matching(both, enumerate_cliques(H, within=both))
    if outer is None:
        return None
    return inner, outer


def is_absorbing(H: PartiteHypergraph, A: Sequence[Vertex], T: Sequence[Vertex]) -> bool:
    return absorbing_matchings(H, A, T) is not None


def _absorber_options(H: PartiteHypergraph, anchor: Vertex, partner: Vertex,
                      blocked: set[Vertex]) -> list[Edge]:
    """(t-1)-sets U missing anchor's class, avoiding ``blocked``, with U+anchor
    and U+partner both cliques."""
    c = anchor[0]
    allowed = [v for v in H.vertices() if v[0] != c and v not in blocked] + [anchor]
    out = []
    for K in enumerate_cliques(H, within=allowed):
        U = tuple(v for v in K if v != anchor)
        if H.is_clique(U + (partner,)):
            out.append(U)
    return out


def find_absorbing_sets(H: PartiteHypergraph, T: Sequence[Vertex],
                        sample_budget: int | None = None, seed: int = 0) -> list[Edge]:
    """Absorbing m-sets for T built edge by edge.

    Start from a clique v_1 u_2 ... u_t avoiding T, then for each later class j
    pick a (t-1)-set U_j, disjoint from everything chosen so far, completing
    both u_j and v_j to cliques.  The union of the U_j absorbs T.  With
    ``sample_budget=None`` every branch is explored; otherwise that many random
    attempts are made and the distinct successes returned.
    """
    t = H.t
    T = tuple(sorted(T))
    if _balanced_counts(T, t) != [1] * t or len(set(T)) != t:
        raise ValueError(f"T must be a balanced {t}-set")
    v = {x[0]: x for x in T}
    found: set[Edge] = set()

    starts = enumerate_cliques(
        H, within=[x for x in H.vertices() if x[0] != 0 and x not in T] + [v[0]])

    def grow(parts: list[Edge], j: int, rng: np.random.Generator | None) -> None:
        if j == t:
            A = tuple(sorted(x for U in parts for x in U))
            found.add(A)
            return
        u_j = next(x for x in parts[0] if x[0] == j)
        blocked = set(T) | {x for U in parts for x in U}
        opts = _absorber_options(H, u_j, v[j], blocked)
        if rng is not None:
            if not opts:
                return
            opts = [opts[int(rng.integers(len(opts)))]]
        for U in opts:
            grow(parts + [U], j + 1, rng)

    if sample_budget is None:
        for K in starts:
            grow([tuple(x for x in K if x != v[0])], 1, None)
    else:
        rng = stream(seed, "find_absorbing_sets")
        for _ in range(sample_budget):
            if not starts:
                break
            K = starts[int(rng.integers(len(starts)))]
            grow([tuple(x for x in K if x != v[0])], 1, rng)
    return sorted(A for A in found if is_absorbing(H, A, T))


def asymptotic_selection_prob(gamma: float, t: int, n: int) -> float:
    m = t * (t - 1)
    return gamma ** m * n / (t ** 3 * 2 ** (t + 3) * comb(n, t - 1) ** t)


def _random_member(rng: np.random.Generator, t: int, n: int) -> Edge:
    return tuple(sorted((c, int(p)) for c in range(t)
                        for p in rng.choice(n, size=t - 1, replace=False)))


def _random_t_set(rng: np.random.Generator, pools: list[list[Vertex]]) -> Edge:
    return tuple(pool[int(rng.integers(len(pool)))] for pool in pools)


def build_absorbing_family(H: PartiteHypergraph, config: AbsorptionConfig) -> AbsorbingFamily:
    """Sample balanced m-sets, prune, and audit until every audited t-set is absorbable.

    Each draw picks t-1 random vertices per class.  The number of draws is
    Binomial(C(n, t-1)^t, p), floored at twice the number of members the
    leftover capacity needs.  Both members of any intersecting pair are
    discarded, then members without a perfect matching of their own, then the
    family is trimmed to the size budget.
    """
    t, n = H.t, H.n
    m = t * (t - 1)
    needed = ceil(config.leftover_capacity / t)
    budget_members = None if config.family_size_budget is None else config.family_size_budget // m
    if budget_members == 0:
        if needed:
            raise ValueError("family size budget 0 cannot serve a positive leftover capacity")
        return AbsorbingFamily(t, [], [], config.leftover_capacity)
    if budget_members is not None and budget_members < needed:
        raise ValueError(f"family size budget allows {budget_members} members, "
                         f"leftover capacity needs {needed}")
    if n < t - 1:
        raise ValueError(f"classes of size {n} cannot hold an absorbing set")
    p = config.selection_prob
    if p is None:
        p = asymptotic_selection_prob(config.gamma, t, n)
    total = comb(n, t - 1) ** t
    diagnostics: list[str] = []
    for attempt in range(1, config.max_retries + 1):
        rng = stream(config.seed, "absorbing_family", attempt)
        drawn = int(rng.binomial(total, p)) if total < 2**62 else int(rng.poisson(total * p))
        draws = max(drawn, 2 * needed)
        F = sorted({_random_member(rng, t, n) for _ in range(draws)})
        owner: dict[Vertex, list[int]] = {}
        for i, A in enumerate(F):
            for x in A:
                owner.setdefault(x, []).append(i)
        clash = {i for ids in owner.values() if len(ids) > 1 for i in ids}
        members, matchings = [], []
        for i, A in enumerate(F):
            if i in clash:
                continue
            M = perfect_matching(list(A), enumerate_cliques(H, within=A))
            if M is not None:
                members.append(A)
                matchings.append(M)
        if budget_members is not None:
            members, matchings = members[:budget_members], matchings[:budget_members]
        if len(members) < needed:
            diagnostics.append(f"attempt {attempt}: {len(members)} usable members of "
                               f"{len(F)} drawn, need {needed}")
            continue
        fam = AbsorbingFamily(t, members, matchings, config.leftover_capacity, attempts=attempt)
        if members and needed:
            U = fam.U
            pools = [[x for x in H.vertices() if x[0] == c and x not in U] for c in range(t)]
            if any(not pool for pool in pools):
                diagnostics.append(f"attempt {attempt}: family uses a whole class")
                continue
            counts = []
            for _ in range(config.audit_size):
                T = _random_t_set(rng, pools)
                counts.append(sum(is_absorbing(H, A, T) for A in members))
            fam.audit = {"audited": len(counts), "counts": counts,
                         "min": min(counts, default=0)}
            if counts and min(counts) == 0:
                diagnostics.append(f"attempt {attempt}: an audited t-set has no absorber")
                continue
        log.debug("absorbing family: %d members after %d attempts", len(members), attempt)
        return fam
    raise FamilyRetriesExhausted(
        f"no acceptable absorbing family after {config.max_retries} attempts", diagnostics)


def split_leftover(W: Iterable[Vertex], t: int) -> list[Edge]:
    """Zip each class's leftover (sorted by position) into balanced t-sets."""
    per_class: list[list[Vertex]] = [[] for _ in range(t)]
    for x in sorted(W):
        per_class[x[0]].append(x)
    sizes = {len(c) for c in per_class}
    if len(sizes) != 1:
        raise ValueError("leftover is not balanced")
    return [tuple(col) for col in zip(*per_class)]


def absorb_leftover(H: PartiteHypergraph, fam: AbsorbingFamily, W: Iterable[Vertex],
                    exact_fallback: bool = True) -> Matching:
    """Perfect K_t^k-matching of H[U ∪ W] using one absorbing member per t-set of W."""
    W = sorted(set(W))
    U = fam.U
    if set(W) & U:
        raise ValueError("leftover meets the absorbing family")
    if len(W) % H.t or len(W) > fam.leftover_capacity:
        raise ValueError(f"leftover of size {len(W)} exceeds capacity "
                         f"{fam.leftover_capacity} or is not a multiple of t")
    groups = split_leftover(W, H.t)
    used: set[int] = set()
    pieces: list[Matching] = []
    for T in groups:
        for i, A in enumerate(fam.members):
            if i in used:
                continue
            res = absorbing_matchings(H, A, T)
            if res is not None:
                used.add(i)
                pieces.append(res[1])
                break
        else:
            if exact_fallback:
                M = perfect_matching(sorted(U | set(W)), enumerate_cliques(H, within=U | set(W)))
                if M is not None:
                    log.debug("absorb_leftover: first-fit failed, exact cover succeeded")
                    return M
            raise AbsorptionFailure(f"no unused absorbing member for {T}")
    for i, M in enumerate(fam.matchings):
        if i not in used:
            pieces.append(M)
    out = Matching(tuple(c for M in pieces for c in M.cliques))
    return out
