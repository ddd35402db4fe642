"""Near-perfect K_t^k-matchings by two rounds of randomization.

Sample many small balanced vertex subsets ("copies"), solve a perfect
fractional matching on each, keep every clique T of copy i_T independently
with probability equal to its weight there, and run a semi-random nibble on
the resulting sparse t-graph H*.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, floor
from typing import Sequence

import numpy as np

from .core import Edge, PartiteHypergraph, TGraph, Vertex, enumerate_cliques, min_codegree
from .exact import Matching, find_almost_factor, verify_matching
from .fractional import FractionalAssignment, fractional_threshold_bounds, solve_fractional
from .rng import stream

log = logging.getLogger(__name__)


class CopySamplingError(RuntimeError):
    def __init__(self, msg: str, diagnostics: list[str]):
        super().__init__(msg)
        self.diagnostics = diagnostics


class CopyInfeasible(RuntimeError):
    pass


@dataclass
class ApproxConfig:
    """Parameters of the two-round randomization.

    ``copy_prob``, ``copy_size`` and ``copy_count`` default to n^p_exp,
    n^0.1 - n^0.075 (at least 1) and n^1.1; the exponents themselves can be
    overridden.  ``desk`` gives values usable at n <= 100.
    """

    epsilon: float = 0.1
    gamma: float = 0.1
    copy_prob: float | None = None
    copy_size: int | None = None
    copy_count: int | None = None
    prob_exponent: float = -0.9
    size_exponents: tuple[float, float] = (0.1, 0.075)
    count_exponent: float = 1.1
    theta: float = 0.1
    improve_steps: int = 2000
    seed: int = 0
    max_copy_retries: int = 20
    max_flagged_fraction: float = 1.0
    stats_mode: str = "exhaustive"
    stats_samples: int = 2000
    polish: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.copy_prob is not None and not 0 < self.copy_prob <= 1:
            raise ValueError("copy probability must lie in (0, 1]")
        if self.copy_count is not None and self.copy_count < 1:
            raise ValueError("need at least one copy")
        if self.copy_size is not None and self.copy_size < 1:
            raise ValueError("copy size must be positive")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        if self.stats_mode not in ("exhaustive", "sampled"):
            raise ValueError("stats_mode is 'exhaustive' or 'sampled'")

    @classmethod
    def desk(cls, n: int, t: int, **overrides) -> "ApproxConfig":
        m = min(n, 2 * t)
        base = dict(copy_size=m, copy_count=n, copy_prob=min(1.0, 2 * m / n))
        base.update(overrides)
        return cls(**base)

    def resolve(self, n: int) -> tuple[float, int, int]:
        """(p, m, N) for class size n."""
        p = self.copy_prob if self.copy_prob is not None else min(1.0, n ** self.prob_exponent)
        if self.copy_size is not None:
            m = self.copy_size
        else:
            a, b = self.size_exponents
            m = max(1, floor(n ** a - n ** b))
        N = self.copy_count if self.copy_count is not None else max(1, round(n ** self.count_exponent))
        if m > n:
            raise ValueError(f"copy size {m} exceeds class size {n}")
        return p, m, N


@dataclass
class CopyFamilyStats:
    membership: dict[Vertex, int]
    z2: int
    z3: int
    min_codegrees: list[int]
    flagged: list[int]
    threshold: float
    mode: str = "exhaustive"
    samples: int | None = None

    def to_dict(self) -> dict:
        Y = list(self.membership.values())
        return {"membershipMin": min(Y, default=0), "membershipMax": max(Y, default=0),
                "z2": self.z2, "z3": self.z3, "minCodegrees": self.min_codegrees,
                "flagged": self.flagged, "threshold": self.threshold, "mode": self.mode,
                "samples": self.samples}


@dataclass
class RegularityStats:
    D: float
    tau: float | None
    delta2: int
    vertices: int
    edges: int

    def to_dict(self) -> dict:
        return {"D": self.D, "tau": self.tau, "delta2": self.delta2,
                "vertices": self.vertices, "edges": self.edges}


def copy_threshold(t: int, k: int, n: int, m: int, gamma: float) -> float:
    """(phi* + gamma/4) m with phi* the upper-bound ratio at class size n."""
    phi = fractional_threshold_bounds(t, k, n)[1] / n
    return (phi + gamma / 4) * m


def _draw_copy(rng: np.random.Generator, t: int, n: int, p: float, m: int,
               max_redraws: int = 10_000) -> Edge:
    parts = []
    for c in range(t):
        for _ in range(max_redraws):
            R = np.flatnonzero(rng.random(n) < p)
            if len(R) >= m:
                break
        else:
            raise CopySamplingError(f"binomial draw kept undershooting m={m}", [])
        parts.extend((c, int(x)) for x in rng.choice(R, size=m, replace=False))
    return tuple(sorted(parts))


def copy_family_stats(H: PartiteHypergraph, copies: Sequence[Edge], threshold: float,
                      mode: str = "exhaustive", samples: int = 2000,
                      seed: int = 0) -> CopyFamilyStats:
    Y = Counter({v: 0 for v in H.vertices()})
    for R in copies:
        Y.update(R)
    if mode == "exhaustive":
        pairs: Counter = Counter()
        triples: Counter = Counter()
        for R in copies:
            pairs.update(combinations(R, 2))
            triples.update(combinations(R, 3))
        z2 = sum(1 for y in pairs.values() if y >= 3)
        z3 = sum(1 for y in triples.values() if y >= 2)
        n_samples = None
    else:
        rng = stream(seed, "copy_stats")
        verts = H.vertices()
        sets = [frozenset(R) for R in copies]
        z2 = z3 = 0
        for _ in range(samples):
            S = [verts[i] for i in rng.choice(len(verts), size=2, replace=False)]
            z2 += sum(all(v in R for v in S) for R in sets) >= 3
            S = [verts[i] for i in rng.choice(len(verts), size=3, replace=False)]
            z3 += sum(all(v in R for v in S) for R in sets) >= 2
        n_samples = samples
    mins = [min_codegree(H.induced(R)[0]).value for R in copies]
    flagged = [i for i, d in enumerate(mins) if d < threshold]
    return CopyFamilyStats(dict(Y), z2, z3, mins, flagged, threshold, mode, n_samples)


def sample_copies(H: PartiteHypergraph, cfg: ApproxConfig) -> tuple[list[Edge], CopyFamilyStats]:
    """N balanced copies with m vertices per class, plus their statistics."""
    if not H.balanced:
        raise ValueError("sample_copies needs a balanced host")
    n, t = H.n, H.t
    p, m, N = cfg.resolve(n)
    copies = [_draw_copy(stream(cfg.seed, "copies", i), t, n, p, m) for i in range(N)]
    stats = copy_family_stats(H, copies, copy_threshold(t, H.k, n, m, cfg.gamma),
                              cfg.stats_mode, cfg.stats_samples, cfg.seed)
    _check_flagged(stats, N, cfg)
    return copies, stats


def _check_flagged(stats: CopyFamilyStats, N: int, cfg: ApproxConfig) -> None:
    if len(stats.flagged) > cfg.max_flagged_fraction * N:
        diag = [f"copy {i}: min codegree {stats.min_codegrees[i]} < {stats.threshold:.3f}"
                for i in stats.flagged]
        raise CopySamplingError(f"{len(stats.flagged)} of {N} copies fail the codegree check",
                                diag)


def _check_solution(H: PartiteHypergraph, R: Edge, cliques: set[Edge],
                    a: FractionalAssignment | None, i: int) -> None:
    if a is None:
        raise ValueError(f"missing fractional solution for copy {i}")
    load = {v: Fraction(0) for v in R}
    for T, w in a.weights.items():
        if not w:
            continue
        if T not in cliques or not 0 <= w <= 1:
            raise ValueError(f"unverified solution for copy {i}: bad entry {T} -> {w}")
        for v in T:
            load[v] += w
    if any(s != 1 for s in load.values()):
        raise ValueError(f"unverified solution for copy {i}: loads are not all 1")


def build_sparse_tgraph(H: PartiteHypergraph, copies: Sequence[Edge],
                        solutions: Sequence[FractionalAssignment | None],
                        seed: int = 0, verify: bool = True) -> tuple[TGraph, int]:
    """Random t-graph H*; also returns how many cliques lie in more than one copy.

    Clique T is assigned to the first copy containing it and kept with
    probability equal to its weight in that copy's solution.  Each solution
    must be a perfect fractional matching of its copy unless ``verify`` is off.
    """
    if len(solutions) != len(copies):
        raise ValueError(f"{len(copies)} copies but {len(solutions)} solutions")
    owner: dict[Edge, int] = {}
    seen_twice: set[Edge] = set()
    for i, (R, a) in enumerate(zip(copies, solutions)):
        cl = set(enumerate_cliques(H, within=R))
        if verify:
            _check_solution(H, R, cl, a, i)
        elif a is None:
            raise ValueError(f"missing fractional solution for copy {i}")
        for T in cl:
            if T in owner:
                seen_twice.add(T)
            else:
                owner[T] = i
    order = sorted(owner)
    draws = stream(seed, "sparse_tgraph").random(len(order))
    kept = []
    for T, u in zip(order, draws):
        w = solutions[owner[T]].weights.get(T, 0)
        if u < w:
            kept.append(T)
    if seen_twice:
        log.debug("build_sparse_tgraph: %d cliques in several copies", len(seen_twice))
    return TGraph(H.t, H.class_sizes, frozenset(kept)), len(seen_twice)


def regularity_stats(G: TGraph) -> RegularityStats:
    verts = G.vertices()
    deg = Counter({v: 0 for v in verts})
    pair: Counter = Counter()
    for e in G.edges:
        deg.update(e)
        pair.update(combinations(e, 2))
    if not G.edges or not verts:
        return RegularityStats(0.0, None, 0, len(verts), 0)
    D = sum(deg.values()) / len(verts)
    tau = max(abs(d - D) for d in deg.values()) / D
    return RegularityStats(D, tau, max(pair.values(), default=0), len(verts), len(G.edges))


class _LocalSearch:
    """Matching improvement by 1->2 swaps and random 1->1 plateau moves."""

    def __init__(self, edges: Sequence[Edge], matching: Sequence[Edge],
                 vertices: Sequence[Vertex]):
        self.inc: dict[Vertex, list[Edge]] = {v: [] for v in vertices}
        for e in edges:
            for v in e:
                self.inc[v].append(e)
        self.owner: dict[Vertex, Edge] = {v: e for e in matching for v in e}
        self.matched: set[Edge] = set(matching)
        self.vertices = sorted(vertices)

    def uncovered(self) -> int:
        return len(self.vertices) - len(self.owner)

    def _add(self, e: Edge) -> None:
        self.matched.add(e)
        for v in e:
            self.owner[v] = e

    def _drop(self, e: Edge) -> None:
        self.matched.discard(e)
        for v in e:
            del self.owner[v]

    def _free_edges_at(self, v: Vertex) -> list[Edge]:
        return [f for f in self.inc[v] if not any(x in self.owner for x in f)]

    def _swap(self, e: Edge) -> list[Edge] | None:
        inside = set(e)
        cands = sorted({f for v in e for f in self.inc[v]
                        if f != e and all(x in inside or x not in self.owner for x in f)})
        for a, b in combinations(cands, 2):
            if not set(a) & set(b):
                self._drop(e)
                self._add(a)
                self._add(b)
                return [a, b]
        return None

    def improve(self) -> None:
        """Greedy additions and 1->2 swaps until neither applies."""
        for v in self.vertices:
            if v not in self.owner:
                for f in self._free_edges_at(v):
                    if not any(x in self.owner for x in f):
                        self._add(f)
        queue = sorted(self.matched)
        while queue:
            e = queue.pop()
            if e in self.matched:
                new = self._swap(e)
                if new:
                    queue.extend(new)

    def plateau(self, rng: np.random.Generator, steps: int, target: int) -> None:
        for _ in range(steps):
            if self.uncovered() <= target:
                return
            free = [v for v in self.vertices if v not in self.owner]
            v = free[int(rng.integers(len(free)))]
            opts = []
            for f in self.inc[v]:
                owners = {self.owner[x] for x in f if x in self.owner}
                if len(owners) == 1:
                    opts.append((f, owners.pop()))
            if not opts:
                continue
            f, e = opts[int(rng.integers(len(opts)))]
            self._drop(e)
            self._add(f)
            freed = [x for x in e if x not in self.owner]
            touched = {f}
            for x in freed:
                for g in self._free_edges_at(x):
                    if not any(y in self.owner for y in g):
                        self._add(g)
                        touched.add(g)
                for g in self.inc[x]:
                    touched.update(self.owner[y] for y in g if y in self.owner)
            queue = sorted(touched)
            while queue:
                h = queue.pop()
                if h in self.matched:
                    new = self._swap(h)
                    if new:
                        queue.extend(new)


def nibble_matching(G: TGraph, epsilon: float, seed: int = 0, theta: float = 0.1,
                    improve_steps: int = 2000, trace: list[int] | None = None) -> Matching:
    """Semi-random matching of a t-graph, then a greedy tail and local improvement.

    Each round keeps every surviving edge with probability theta / D (D the
    current mean degree over vertices that still have edges) and accepts the
    kept edges that meet no other kept edge.  Once fewer than 1/theta edges
    survive, a lexicographic greedy sweep finishes.  Local search then applies
    1->2 swaps, and random plateau moves while more than epsilon |V| vertices
    remain uncovered.  ``trace`` receives the uncovered count after each stage.
    """
    rng = stream(seed, "nibble")
    verts = G.vertices()
    alive = sorted(G.edges)
    covered: set[Vertex] = set()
    chosen: list[Edge] = []

    def note() -> None:
        if trace is not None:
            trace.append(len(verts) - len(covered))

    note()
    stop = ceil(1 / theta)
    while len(alive) >= stop:
        deg = Counter(v for e in alive for v in e)
        D = sum(deg.values()) / len(deg)
        q = min(1.0, theta / D)
        hits = [e for e, u in zip(alive, rng.random(len(alive))) if u < q]
        mult = Counter(v for e in hits for v in e)
        for e in hits:
            if all(mult[v] == 1 for v in e):
                chosen.append(e)
                covered.update(e)
        alive = [e for e in alive if not any(v in covered for v in e)]
        note()
    for e in alive:
        if not any(v in covered for v in e):
            chosen.append(e)
            covered.update(e)
    note()
    search = _LocalSearch(sorted(G.edges), chosen, verts)
    search.improve()
    search.plateau(rng, improve_steps, floor(epsilon * len(verts)))
    if trace is not None:
        trace.append(search.uncovered())
    return Matching(tuple(search.matched))


def polish_matching(H: PartiteHypergraph, M: Matching, target: int = 0,
                    budget: int = 200_000) -> Matching:
    """Grow M with host cliques until at most ``target`` vertices are uncovered.

    First a maximum matching of the uncovered part is added (clique by clique,
    stopping at the target), then 1->2 swaps trade a clique for two inside its
    vertices plus the uncovered ones.
    """
    cliques = list(M.cliques)
    used = M.vertices()
    free = {v for v in H.vertices() if v not in used}
    if len(free) > target:
        extra = find_almost_factor(H, budget=budget, within=free).matching
        for c in extra.cliques:
            if len(free) <= target:
                break
            cliques.append(c)
            free -= set(c)
    changed = True
    while changed and len(free) > target:
        changed = False
        for e in sorted(cliques):
            cand = enumerate_cliques(H, within=sorted(free | set(e)))
            pair = next(((a, b) for a, b in combinations(cand, 2) if not set(a) & set(b)), None)
            if pair:
                cliques.remove(e)
                cliques.extend(pair)
                free -= set(pair[0]) | set(pair[1])
                changed = True
                break
    return Matching(tuple(cliques))


@dataclass
class ApproxResult:
    matching: Matching
    uncovered: int
    uncovered_per_class: list[int]
    copy_stats: CopyFamilyStats
    regularity: RegularityStats
    violations: int
    redraws: int = 0
    trace: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"matching": [list(map(list, c)) for c in self.matching.cliques],
                "uncovered": self.uncovered, "uncoveredPerClass": self.uncovered_per_class,
                "copyStats": self.copy_stats.to_dict(),
                "regularityStats": self.regularity.to_dict(),
                "violations": self.violations, "redraws": self.redraws}


def almost_perfect_factor(H: PartiteHypergraph, cfg: ApproxConfig) -> ApproxResult:
    if not H.balanced:
        raise ValueError("almost_perfect_factor needs a balanced host")
    n, t = H.n, H.t
    p, m, N = cfg.resolve(n)
    copies = [_draw_copy(stream(cfg.seed, "copies", i), t, n, p, m) for i in range(N)]
    solutions: list[FractionalAssignment] = []
    redraws = 0
    for i in range(N):
        for attempt in range(cfg.max_copy_retries + 1):
            sub, back = H.induced(copies[i])
            res = solve_fractional(sub)
            if res.feasible:
                break
            redraws += 1
            copies[i] = _draw_copy(stream(cfg.seed, "copies", i, attempt + 1), t, n, p, m)
        else:
            raise CopyInfeasible(f"copy {i} has no perfect fractional matching after "
                                 f"{cfg.max_copy_retries} redraws")
        solutions.append(FractionalAssignment(
            {tuple(sorted(back[v] for v in T)): w for T, w in res.assignment.weights.items() if w}))
    stats = copy_family_stats(H, copies, copy_threshold(t, H.k, n, m, cfg.gamma),
                              cfg.stats_mode, cfg.stats_samples, cfg.seed)
    _check_flagged(stats, N, cfg)
    hstar, violations = build_sparse_tgraph(H, copies, solutions, cfg.seed)
    trace: list[int] = []
    M = nibble_matching(hstar, cfg.epsilon, cfg.seed, cfg.theta, cfg.improve_steps, trace)
    if cfg.polish:
        M = polish_matching(H, M, floor(cfg.epsilon * H.num_vertices))
    rep = verify_matching(H, M)
    if not rep.ok:
        raise AssertionError(f"approximate matching failed verification: {rep.problems[:3]}")
    covered = M.vertices()
    per_class = [sum(1 for p_ in range(n) if (c, p_) not in covered) for c in range(t)]
    assert len(set(per_class)) == 1, "leftover is unbalanced"
    return ApproxResult(M, sum(per_class), per_class, stats, regularity_stats(hstar),
                        violations, redraws, trace)
