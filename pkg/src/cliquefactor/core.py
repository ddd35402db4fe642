"""Balanced t-partite k-graphs, legal sets, codegrees and clique enumeration.

Vertices are ``(class_index, position)`` pairs, both 0-based.  Every ordering
in the package is the lexicographic order on these pairs, so enumerations are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

Vertex = tuple[int, int]
Edge = tuple[Vertex, ...]


class CliqueCapExceeded(RuntimeError):
    """Raised when clique enumeration passes its cap; carries the partial list."""

    def __init__(self, cap: int, partial: list[Edge]):
        super().__init__(f"clique enumeration exceeded cap {cap}")
        self.cap = cap
        self.partial = partial


def index_set(vertices: Iterable[Vertex]) -> tuple[int, ...] | None:
    """Classes touched by a vertex set, or None when the set is not legal."""
    classes = [v[0] for v in vertices]
    if len(set(classes)) != len(classes):
        return None
    return tuple(sorted(classes))


def is_legal(vertices: Iterable[Vertex]) -> bool:
    return index_set(vertices) is not None


def vertex_id(v: Vertex) -> str:
    return f"c{v[0]}.v{v[1]}"


def validate(t: int, k: int, class_sizes: Sequence[int],
             edges: Iterable[Sequence[Vertex]]) -> list[str]:
    """Return every invariant violation of raw instance data (empty if fine)."""
    problems: list[str] = []
    if t < 2:
        problems.append(f"class count t={t} must be at least 2")
    if not 2 <= k <= max(t, 2):
        problems.append(f"uniformity k={k} must satisfy 2 <= k <= t")
    if len(class_sizes) != t:
        problems.append(f"expected {t} class sizes, got {len(class_sizes)}")
    if any(s < 0 for s in class_sizes):
        problems.append("negative class size")
    seen: set[Edge] = set()
    for idx, raw in enumerate(edges):
        e = tuple(sorted(tuple(v) for v in raw))
        bad_vertex = [v for v in e
                      if not (0 <= v[0] < len(class_sizes)
                              and 0 <= v[1] < class_sizes[v[0]])]
        if bad_vertex:
            problems.append(f"edge {idx}: bad class index or position "
                            f"{', '.join(map(str, bad_vertex))}")
            continue
        if len(set(e)) != len(e) or len(e) != k:
            problems.append(f"edge {idx}: expected {k} distinct vertices")
            continue
        if not is_legal(e):
            problems.append(f"edge {idx}: edge not legal (two vertices share a class)")
            continue
        if e in seen:
            problems.append(f"edge {idx}: duplicate edge")
            continue
        seen.add(e)
    return problems


class PartiteHypergraph:
    """Immutable t-partite k-graph.

    The neighbourhood index ``N_j(T)`` for legal (k-1)-sets T is built on
    construction and stored as one bitmask per class (bit p set means vertex
    ``(j, p)`` completes T to an edge).
    """

    def __init__(self, t: int, k: int, class_sizes: Sequence[int],
                 edges: Iterable[Sequence[Vertex]]):
        edges = [tuple(sorted(tuple(v) for v in e)) for e in edges]
        problems = validate(t, k, class_sizes, edges)
        if problems:
            raise ValueError("invalid hypergraph: " + "; ".join(problems[:5]))
        self.t = t
        self.k = k
        self.class_sizes = tuple(int(s) for s in class_sizes)
        self.edges: frozenset[Edge] = frozenset(edges)
        self._nbr: dict[Edge, list[int]] = {}
        for e in self.edges:
            for i, v in enumerate(e):
                rest = e[:i] + e[i + 1:]
                masks = self._nbr.get(rest)
                if masks is None:
                    masks = self._nbr[rest] = [0] * t
                masks[v[0]] |= 1 << v[1]
        self._cliques: list[Edge] | None = None
        self._incident: dict[Vertex, list[Edge]] | None = None

    # -- basic structure -------------------------------------------------
    @property
    def n(self) -> int:
        """Common class size; raises for unbalanced hosts."""
        if not self.balanced:
            raise ValueError("hypergraph is not balanced")
        return self.class_sizes[0]

    @property
    def balanced(self) -> bool:
        return len(set(self.class_sizes)) == 1

    @property
    def num_vertices(self) -> int:
        return sum(self.class_sizes)

    def vertices(self) -> list[Vertex]:
        return [(c, p) for c in range(self.t) for p in range(self.class_sizes[c])]

    def class_mask(self, c: int) -> int:
        return (1 << self.class_sizes[c]) - 1

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def has_edge(self, e: Iterable[Vertex]) -> bool:
        return tuple(sorted(e)) in self.edges

    def neighbour_mask(self, T: Edge, c: int) -> int:
        """Bitmask of class-c vertices completing the legal (k-1)-set T."""
        masks = self._nbr.get(T)
        return masks[c] if masks else 0

    def incident_edges(self, v: Vertex) -> list[Edge]:
        if self._incident is None:
            inc: dict[Vertex, list[Edge]] = {}
            for e in sorted(self.edges):
                for u in e:
                    inc.setdefault(u, []).append(e)
            self._incident = inc
        return self._incident.get(v, [])

    def is_clique(self, S: Iterable[Vertex]) -> bool:
        """True iff S is legal and all its k-subsets are edges."""
        S = tuple(sorted(S))
        if not is_legal(S):
            return False
        return all(sub in self.edges for sub in combinations(S, self.k))

    @property
    def cliques(self) -> list[Edge]:
        if self._cliques is None:
            self._cliques = enumerate_cliques(self)
        return self._cliques

    def induced(self, vertices: Iterable[Vertex]) -> tuple["PartiteHypergraph", dict[Vertex, Vertex]]:
        """Induced subgraph relabelled to consecutive positions.

        Returns the subgraph and a map from new vertex ids to original ids.
        """
        keep = sorted(set(vertices))
        per_class: list[list[Vertex]] = [[] for _ in range(self.t)]
        for v in keep:
            per_class[v[0]].append(v)
        old_to_new = {v: (c, i) for c in range(self.t) for i, v in enumerate(per_class[c])}
        new_edges = [tuple(old_to_new[v] for v in e) for e in self.edges
                     if all(v in old_to_new for v in e)]
        sub = PartiteHypergraph(self.t, self.k, [len(x) for x in per_class], new_edges)
        return sub, {new: old for old, new in old_to_new.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartiteHypergraph):
            return NotImplemented
        return (self.t, self.k, self.class_sizes, self.edges) == \
            (other.t, other.k, other.class_sizes, other.edges)

    def __hash__(self) -> int:
        return hash((self.t, self.k, self.class_sizes, self.edges))

    def __repr__(self) -> str:
        return (f"PartiteHypergraph(t={self.t}, k={self.k}, "
                f"class_sizes={self.class_sizes}, edges={len(self.edges)})")


@dataclass
class Report:
    """Outcome of a report-style check: ``ok`` iff ``problems`` is empty."""

    problems: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class CodegreeReport:
    level: int
    per_index: dict[tuple[int, ...], int]
    value: int
    witness: tuple[Edge, tuple[int, ...]] | None = None


@dataclass(frozen=True)
class TGraph:
    """A t-uniform hypergraph on a partite vertex set with [t]-legal edges."""

    t: int
    class_sizes: tuple[int, ...]
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        for e in self.edges:
            if len(e) != self.t or index_set(e) != tuple(range(self.t)):
                raise ValueError(f"hyperedge {e} is not [t]-legal")

    def vertices(self) -> list[Vertex]:
        return [(c, p) for c in range(self.t) for p in range(self.class_sizes[c])]

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def _masks_for(H: PartiteHypergraph, within: Iterable[Vertex] | None) -> list[int]:
    if within is None:
        return [H.class_mask(c) for c in range(H.t)]
    masks = [0] * H.t
    for c, p in within:
        if p < H.class_sizes[c]:
            masks[c] |= 1 << p
    return masks


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def enumerate_cliques(H: PartiteHypergraph, cap: int | None = None,
                      within: Iterable[Vertex] | None = None) -> list[Edge]:
    """All [t]-legal t-sets spanning a K_t^k, in lexicographic order.

    Backtracks class by class; the candidates in class c are the intersection
    of the neighbour masks of every (k-1)-subset of the vertices chosen so far.
    ``within`` restricts the search to a vertex subset.
    """
    t, k = H.t, H.k
    allowed = _masks_for(H, within)
    out: list[Edge] = []
    chosen: list[Vertex] = []

    def extend(c: int) -> None:
        if c == t:
            out.append(tuple(chosen))
            if cap is not None and len(out) > cap:
                raise CliqueCapExceeded(cap, out[:cap])
            return
        cand = allowed[c]
        if len(chosen) >= k - 1:
            for R in combinations(chosen, k - 1):
                cand &= H.neighbour_mask(R, c)
                if not cand:
                    return
        for p in _bits(cand):
            chosen.append((c, p))
            extend(c + 1)
            chosen.pop()

    extend(0)
    return out


def auxiliary_clique_graph(H: PartiteHypergraph) -> TGraph:
    """The t-graph whose hyperedges are the vertex sets of K_t^k copies in H."""
    return TGraph(H.t, H.class_sizes, frozenset(H.cliques))


def codegree(H: PartiteHypergraph, T: Sequence[Vertex], J: Iterable[int]) -> int:
    """Number of J-legal sets S with S ∪ T an edge of H."""
    T = tuple(sorted(T))
    J = tuple(sorted(set(J)))
    I = index_set(T)
    if I is None:
        raise ValueError(f"{T} is not a legal set")
    if set(I) & set(J):
        raise ValueError(f"index set {J} meets the classes {I} of T")
    if len(I) + len(J) != H.k or not T:
        raise ValueError(f"|I| + |J| must equal k={H.k} with |I| >= 1")
    if any(not 0 <= j < H.t for j in J):
        raise ValueError(f"class indices {J} out of range")
    if len(J) == 1:
        return H.neighbour_mask(T, J[0]).bit_count()
    Tset = set(T)
    count = 0
    for e in H.incident_edges(T[0]):
        if Tset.issubset(e):
            rest = index_set(v for v in e if v not in Tset)
            count += rest == J
    return count


def _legal_sets(H: PartiteHypergraph, I: Sequence[int]) -> Iterator[Edge]:
    for positions in product(*(range(H.class_sizes[c]) for c in I)):
        yield tuple(zip(I, positions))


def min_codegree(H: PartiteHypergraph, level: int | None = None) -> CodegreeReport:
    """Exact minimum codegree over all legal level-sets and admissible J."""
    k, t = H.k, H.t
    level = k - 1 if level is None else level
    if not 1 <= level <= k - 1:
        raise ValueError(f"level must lie in [1, {k - 1}]")
    m = k - level
    counts: dict[tuple[Edge, tuple[int, ...]], int] | None = None
    if m > 1:
        counts = {}
        for e in H.edges:
            for T in combinations(e, level):
                J = tuple(v[0] for v in e if v not in T)
                counts[(T, J)] = counts.get((T, J), 0) + 1
    per_index: dict[tuple[int, ...], int] = {}
    best: tuple[int, tuple[Edge, tuple[int, ...]]] | None = None
    for I in combinations(range(t), level):
        others = [c for c in range(t) if c not in I]
        low: int | None = None
        for T in _legal_sets(H, I):
            for J in combinations(others, m):
                if counts is None:
                    d = H.neighbour_mask(T, J[0]).bit_count()
                else:
                    d = counts.get((T, J), 0)
                if low is None or d < low:
                    low = d
                if best is None or d < best[0]:
                    best = (d, (T, J))
        if low is not None:
            per_index[I] = low
    if best is None:
        return CodegreeReport(level, per_index, 0, None)
    return CodegreeReport(level, per_index, best[0], best[1])


class GeneralHypergraph:
    """A k-uniform hypergraph on vertices ``0..n-1`` with no partition."""

    def __init__(self, n: int, k: int, edges: Iterable[Sequence[int]]):
        if n < 0 or k < 1:
            raise ValueError("need n >= 0 and k >= 1")
        normalized = [tuple(sorted(int(v) for v in e)) for e in edges]
        seen: set[tuple[int, ...]] = set()
        for idx, e in enumerate(normalized):
            if len(e) != k or len(set(e)) != k:
                raise ValueError(f"edge {idx}: expected {k} distinct vertices")
            if not all(0 <= v < n for v in e):
                raise ValueError(f"edge {idx}: vertex out of range")
            if e in seen:
                raise ValueError(f"edge {idx}: duplicate edge")
            seen.add(e)
        self.n = n
        self.k = k
        self.edges: frozenset[tuple[int, ...]] = frozenset(normalized)
        self._incident: dict[int, list[tuple[int, ...]]] | None = None

    def incident_edges(self, v: int) -> list[tuple[int, ...]]:
        if self._incident is None:
            inc: dict[int, list[tuple[int, ...]]] = {}
            for e in sorted(self.edges):
                for u in e:
                    inc.setdefault(u, []).append(e)
            self._incident = inc
        return self._incident.get(v, [])

    def link(self, T: Sequence[int]) -> list[tuple[int, ...]]:
        """Edges of the link of T: sets S with S ∪ T an edge, sorted."""
        T = tuple(sorted(T))
        if not T:
            return sorted(self.edges)
        Ts = set(T)
        return sorted(tuple(v for v in e if v not in Ts)
                      for e in self.incident_edges(T[0]) if Ts.issubset(e))

    def degree(self, T: Sequence[int]) -> int:
        return len(self.link(T))

    def min_degree(self, level: int) -> int:
        return min((self.degree(T) for T in combinations(range(self.n), level)), default=0)

    def __repr__(self) -> str:
        return f"GeneralHypergraph(n={self.n}, k={self.k}, edges={len(self.edges)})"
