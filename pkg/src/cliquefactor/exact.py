"""Exact perfect K_t^k-factor search, counting and maximum matchings.

All searches run on a generic hyperedge family over a vertex list, so the
same code decides perfect matchings of the auxiliary clique t-graph of a host
and of any sub-family (absorbing sets, leftovers).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import Edge, PartiteHypergraph, Report, Vertex, enumerate_cliques

DEFAULT_BUDGET = 10_000_000


class BudgetExhausted(RuntimeError):
    def __init__(self, nodes: int, partial=None):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes
        self.partial = partial


@dataclass(frozen=True)
class Matching:
    """Pairwise disjoint cliques, each a sorted tuple of vertices."""

    cliques: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cliques", tuple(sorted(tuple(sorted(c)) for c in self.cliques)))

    @property
    def size(self) -> int:
        return len(self.cliques)

    def vertices(self) -> set[Vertex]:
        return {v for c in self.cliques for v in c}

    def __add__(self, other: "Matching") -> "Matching":
        return Matching(self.cliques + other.cliques)

    def relabel(self, mapping: dict[Vertex, Vertex]) -> "Matching":
        return Matching(tuple(tuple(mapping[v] for v in c) for c in self.cliques))


def verify_matching(H: PartiteHypergraph, M: Matching, perfect: bool = False,
                    on: Iterable[Vertex] | None = None) -> Report:
    """Check disjointness, clique validity and (optionally) perfection.

    ``on`` names the vertex set a perfect matching must cover; it defaults to
    every vertex of H.
    """
    rep = Report()
    seen: set[Vertex] = set()
    for c in M.cliques:
        if len(c) != H.t or not H.is_clique(c):
            rep.problems.append(f"{c} is not a K_t^k of the host")
        for v in c:
            if v in seen:
                rep.problems.append(f"vertex {v} covered twice")
            seen.add(v)
    if perfect:
        target = set(H.vertices() if on is None else on)
        if seen != target:
            rep.problems.append(f"covers {len(seen & target)} of {len(target)} vertices"
                                + (f", {len(seen - target)} outside" if seen - target else ""))
    rep.details["covered"] = len(seen)
    return rep


class _Cover:
    """Bitmask exact cover / packing over a hyperedge family."""

    def __init__(self, vertices: Sequence[Vertex], edges: Sequence[Edge], budget: int):
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.edges = [e for e in edges if all(v in self.index for v in e)]
        self.masks = [sum(1 << self.index[v] for v in e) for e in self.edges]
        self.incident: list[list[int]] = [[] for _ in self.vertices]
        for j, e in enumerate(self.edges):
            for v in e:
                self.incident[self.index[v]].append(j)
        self.full = (1 << len(self.vertices)) - 1
        self.budget = budget
        self.nodes = 0

    def _tick(self, partial=None) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted(self.nodes, partial)

    def _choose(self, covered: int) -> tuple[int, list[int]] | None:
        """Uncovered vertex with fewest usable edges (first such index on ties)."""
        best: tuple[int, list[int]] | None = None
        free = self.full & ~covered
        while free:
            low = free & -free
            i = low.bit_length() - 1
            free ^= low
            opts = [j for j in self.incident[i] if not self.masks[j] & covered]
            if best is None or len(opts) < len(best[1]):
                best = (i, opts)
                if not opts:
                    break
        return best

    def find(self) -> list[int] | None:
        chosen: list[int] = []

        def rec(covered: int) -> bool:
            self._tick()
            if covered == self.full:
                return True
            _, opts = self._choose(covered)
            for j in opts:
                chosen.append(j)
                if rec(covered | self.masks[j]):
                    return True
                chosen.pop()
            return False

        return chosen if rec(0) else None

    def count(self, cap: int | None) -> int:
        total = 0

        def rec(covered: int) -> None:
            nonlocal total
            self._tick(total)
            if covered == self.full:
                total += 1
                if cap is not None and total > cap:
                    raise CountCapExceeded(cap)
                return
            _, opts = self._choose(covered)
            for j in opts:
                rec(covered | self.masks[j])

        rec(0)
        return total

    def maximum(self, t: int, class_of: Sequence[int], nclasses: int) -> tuple[list[int], bool]:
        """Maximum packing by branch and bound; returns (edges, proven optimal)."""
        best: list[int] = []
        chosen: list[int] = []
        nv = len(self.vertices)
        class_bits = [0] * nclasses
        for i in range(nv):
            class_bits[class_of[i]] |= 1 << i
        upper_all = min((b.bit_count() for b in class_bits), default=0)

        def bound(open_mask: int) -> int:
            return min((open_mask & b).bit_count() for b in class_bits)

        def rec(open_mask: int, covered: int) -> bool:
            nonlocal best
            self._tick(best)
            if len(chosen) > len(best):
                best = chosen[:]
                if len(best) == upper_all:
                    return True
            if not open_mask or len(chosen) + bound(open_mask) <= len(best):
                return False
            low = open_mask & -open_mask
            i = low.bit_length() - 1
            for j in self.incident[i]:
                m = self.masks[j]
                if m & covered:
                    continue
                chosen.append(j)
                if rec(open_mask & ~m, covered | m):
                    return True
                chosen.pop()
            return rec(open_mask & ~low, covered)

        try:
            rec(self.full, 0)
        except BudgetExhausted:
            return best, False
        return best, True


class CountCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"more than {cap} perfect factors")
        self.lower_bound = cap + 1


def perfect_matching(vertices: Sequence[Vertex], edges: Sequence[Edge],
                     budget: int = DEFAULT_BUDGET) -> Matching | None:
    """Perfect matching of a hyperedge family on ``vertices`` or None."""
    solver = _Cover(vertices, edges, budget)
    found = solver.find()
    if found is None:
        return None
    return Matching(tuple(solver.edges[j] for j in found))


def find_perfect_factor(H: PartiteHypergraph, budget: int = DEFAULT_BUDGET,
                        within: Iterable[Vertex] | None = None) -> Matching | None:
    """A perfect K_t^k-factor of H (or of H[within]); None proves there is none.

    Raises BudgetExhausted when the node budget runs out before a verdict.
    """
    if within is None:
        verts, cliques = H.vertices(), H.cliques
    else:
        verts = sorted(set(within))
        cliques = enumerate_cliques(H, within=verts)
    return perfect_matching(verts, cliques, budget)


def count_perfect_factors(H: PartiteHypergraph, cap: int | None = None,
                          budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of perfect factors (unordered families of cliques).

    Raises CountCapExceeded past ``cap``; its ``lower_bound`` is cap + 1.
    """
    return _Cover(H.vertices(), H.cliques, budget).count(cap)


@dataclass
class AlmostFactor:
    matching: Matching
    uncovered: int
    optimal: bool
    within_target: bool
    nodes: int = 0
    flags: list[str] = field(default_factory=list)


def find_almost_factor(H: PartiteHypergraph, max_uncovered: int = 0,
                       budget: int = DEFAULT_BUDGET,
                       within: Iterable[Vertex] | None = None) -> AlmostFactor:
    """Maximum K_t^k-matching; when the budget runs out, the best one found."""
    if max_uncovered % H.t:
        raise ValueError("max_uncovered must be a multiple of t")
    if within is None:
        verts, cliques = H.vertices(), H.cliques
    else:
        verts = sorted(set(within))
        cliques = enumerate_cliques(H, within=verts)
    solver = _Cover(verts, cliques, budget)
    best, optimal = solver.maximum(H.t, [v[0] for v in verts], H.t)
    M = Matching(tuple(solver.edges[j] for j in best))
    uncovered = len(verts) - H.t * M.size
    res = AlmostFactor(M, uncovered, optimal, uncovered <= max_uncovered, solver.nodes)
    if not optimal:
        res.flags.append("budget-exhausted")
    return res
