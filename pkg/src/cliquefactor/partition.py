"""Random equipartition of a general k-graph into t classes that keeps codegrees.

The link of each audited l-set is split into edge-disjoint matchings.  A
random class assignment is rejected when some matching has too few J-legal
edges, when a class is too large, or when the final degree inequality fails.
Accepted assignments are then balanced exactly by moving the smallest vertex
ids out of oversized classes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb, factorial, log as ln, sqrt
from typing import Sequence

import numpy as np

from .approx import ApproxConfig, ApproxResult, almost_perfect_factor
from .core import GeneralHypergraph, PartiteHypergraph, Report, Vertex
from .rng import stream

logger = logging.getLogger(__name__)

EXHAUSTIVE_AUDIT_MAX_N = 30
SAMPLED_AUDIT_SETS = 500


class PartitionRetriesExhausted(RuntimeError):
    def __init__(self, msg: str, diagnostics: list[str]):
        super().__init__(msg)
        self.diagnostics = diagnostics


def decompose_link(H: GeneralHypergraph, T: Sequence[int]) -> list[list[tuple[int, ...]]]:
    """Greedy colouring of the link's intersection graph; each colour is a matching.

    Link edges are taken in lexicographic order and get the smallest colour
    whose edges they all avoid.
    """
    if len(set(T)) != len(T) or len(T) > H.k - 1:
        raise ValueError(f"T must be a set of at most {H.k - 1} vertices")
    colours: list[list[tuple[int, ...]]] = []
    used: list[set[int]] = []
    for E in H.link(T):
        for c, seen in enumerate(used):
            if seen.isdisjoint(E):
                colours[c].append(E)
                seen.update(E)
                break
        else:
            colours.append([E])
            used.append(set(E))
    return colours


@dataclass
class LinkAudit:
    T: tuple[int, ...]
    matchings: list[list[tuple[int, ...]]]
    mu: dict[tuple[int, tuple[int, ...]], float] = field(default_factory=dict)
    X: dict[tuple[int, tuple[int, ...]], int] = field(default_factory=dict)
    bad: list[bool] = field(default_factory=list)

    @property
    def is_bad(self) -> bool:
        return any(self.bad)


@dataclass
class DecompositionStats:
    audits: list[LinkAudit]
    exhaustive: bool

    @property
    def bad_sets(self) -> list[tuple[int, ...]]:
        return [a.T for a in self.audits if a.is_bad]

    def to_dict(self) -> dict:
        return {"audited": len(self.audits), "exhaustive": self.exhaustive,
                "maxMatchings": max((len(a.matchings) for a in self.audits), default=0),
                "badSets": [list(T) for T in self.bad_sets]}


@dataclass
class PartitionResult:
    t: int
    classes: list[list[int]]
    preliminary: list[int]
    H_prime: PartiteHypergraph
    to_original: dict[Vertex, int]
    decomposition: DecompositionStats
    margins: dict = field(default_factory=dict)
    worst_margin: float | None = None
    attempts: int = 0

    @property
    def assignment(self) -> list[int]:
        out = [0] * sum(len(c) for c in self.classes)
        for j, cls in enumerate(self.classes):
            for v in cls:
                out[v] = j
        return out

    def to_dict(self) -> dict:
        return {"t": self.t, "classes": self.classes, "assignment": self.assignment,
                "attempts": self.attempts, "worstMargin": self.worst_margin,
                "hPrimeEdges": len(self.H_prime.edges),
                "decomposition": self.decomposition.to_dict()}


def _audit_sets(H: GeneralHypergraph, rng: np.random.Generator) -> tuple[list[tuple[int, ...]], bool]:
    n = H.n
    if n <= EXHAUSTIVE_AUDIT_MAX_N:
        return [T for l in range(1, H.k) for T in combinations(range(n), l)], True
    out = []
    for l in range(1, H.k):
        if comb(n, l) <= SAMPLED_AUDIT_SETS:
            out.extend(combinations(range(n), l))
            continue
        picked: set[tuple[int, ...]] = set()
        while len(picked) < SAMPLED_AUDIT_SETS:
            picked.add(tuple(sorted(int(x) for x in rng.choice(n, size=l, replace=False))))
        out.extend(sorted(picked))
    return out, False


def _score(audit: LinkAudit, U: Sequence[int], t: int, k: int, n: int) -> None:
    m = len(audit.matchings[0][0]) if audit.matchings else 0
    audit.mu.clear()
    audit.X.clear()
    audit.bad = []
    for i, M in enumerate(audit.matchings):
        mu = factorial(m) / t ** m * len(M)
        sigs = [tuple(sorted({U[v] for v in E})) for E in M]
        bad = False
        for J in combinations(range(t), m):
            X = sum(1 for s in sigs if s == J)
            audit.mu[i, J] = mu
            audit.X[i, J] = X
            if X <= (1 - sqrt(2 * (2 * k - 1) * ln(n) / mu)) * mu:
                bad = True
        audit.bad.append(bad)


def imbalance_slack(n: int, t: int) -> float:
    return n / t + sqrt(n) * ln(n) ** 0.25 / t


def _redistribute(U: Sequence[int], t: int) -> list[list[int]]:
    classes = [sorted(v for v, c in enumerate(U) if c == j) for j in range(t)]
    target = len(U) // t
    while any(len(c) != target for c in classes):
        big = max(range(t), key=lambda j: (len(classes[j]), -j))
        small = min(range(t), key=lambda j: (len(classes[j]), j))
        v = classes[big].pop(0)
        classes[small].append(v)
        classes[small].sort()
    return classes


def _partite_subgraph(H: GeneralHypergraph, classes: list[list[int]],
                      t: int) -> tuple[PartiteHypergraph, dict[Vertex, int]]:
    to_new = {v: (j, p) for j, cls in enumerate(classes) for p, v in enumerate(cls)}
    edges = []
    for e in H.edges:
        vs = [to_new[v] for v in e]
        if len({c for c, _ in vs}) == len(vs):
            edges.append(tuple(sorted(vs)))
    return (PartiteHypergraph(t, H.k, [len(c) for c in classes], edges),
            {nv: v for v, nv in to_new.items()})


def random_equipartition(H: GeneralHypergraph, t: int, seed: int = 0,
                         max_retries: int = 50) -> PartitionResult:
    n, k = H.n, H.k
    if t < k:
        raise ValueError(f"t={t} < k={k}: no legal edge can exist")
    if n == 0 or n % t:
        raise ValueError(f"t={t} must divide n={n} > 0")
    sets, exhaustive = _audit_sets(H, stream(seed, "partition_audit_sets"))
    audits = [LinkAudit(T, decompose_link(H, T)) for T in sets]
    audits = [a for a in audits if a.matchings]
    slack = imbalance_slack(n, t) if n > 1 else n
    diagnostics: list[str] = []
    for attempt in range(1, max_retries + 1):
        U = [int(c) for c in stream(seed, "partition", attempt).integers(t, size=n)]
        sizes = [U.count(j) for j in range(t)]
        if max(sizes) > slack:
            diagnostics.append(f"attempt {attempt}: class sizes {sizes} exceed {slack:.2f}")
            continue
        for a in audits:
            _score(a, U, t, k, n)
        stats = DecompositionStats(audits, exhaustive)
        if stats.bad_sets:
            diagnostics.append(f"attempt {attempt}: {len(stats.bad_sets)} bad sets")
            continue
        classes = _redistribute(U, t)
        Hp, back = _partite_subgraph(H, classes, t)
        res = PartitionResult(t, classes, U, Hp, back, stats, attempts=attempt)
        rep = verify_degree_preservation(H, res)
        res.margins = rep.details["margins"]
        res.worst_margin = rep.details["worst"]
        if not rep.ok:
            diagnostics.append(f"attempt {attempt}: {rep.problems[0]}")
            continue
        logger.debug("equipartition accepted after %d attempts", attempt)
        return res
    raise PartitionRetriesExhausted(
        f"no acceptable partition after {max_retries} attempts", diagnostics)


def verify_degree_preservation(H: GeneralHypergraph, result: PartitionResult,
                               max_checks: int = 200_000, seed: int = 0) -> Report:
    """Check t^m/m! deg_J^{H'}(T) >= deg^H(T) - 2 sqrt(t ln n) n^(m - 1/2), m = k - l.

    Runs over every l in [k-1], every legal I-set T and every J; when the
    number of legal sets exceeds ``max_checks`` a seeded sample is used.
    """
    n, k, t = H.n, H.k, result.t
    rep = Report()
    cls = result.assignment
    margins: dict[str, float] = {}
    worst: float | None = None
    rng = stream(seed, "preservation_audit")
    for l in range(1, k):
        m = k - l
        slack = 2 * sqrt(t * ln(n)) * n ** (m - 0.5) if n > 1 else 0.0
        scale = t ** m / factorial(m)
        for I in combinations(range(t), l):
            groups = [result.classes[i] for i in I]
            total = 1
            for g in groups:
                total *= len(g)
            if total > max_checks:
                picks = [tuple(g[int(rng.integers(len(g)))] for g in groups)
                         for _ in range(max_checks)]
            else:
                picks = list(product(*groups))
            others = [j for j in range(t) if j not in I]
            for T in picks:
                link = H.link(T)
                counts: dict[tuple[int, ...], int] = {}
                for E in link:
                    sig = tuple(sorted({cls[v] for v in E}))
                    if len(sig) == m:
                        counts[sig] = counts.get(sig, 0) + 1
                for J in combinations(others, m):
                    margin = scale * counts.get(J, 0) - (len(link) - slack)
                    margins[f"{','.join(map(str, sorted(T)))}|{','.join(map(str, J))}"] = margin
                    if worst is None or margin < worst:
                        worst = margin
                    if margin < -1e-9:
                        rep.problems.append(f"T={T}, J={J}: margin {margin:.3f}")
    rep.details.update(margins=margins, worst=worst, checks=len(margins))
    return rep


@dataclass
class CoverResult:
    cliques: list[tuple[int, ...]]
    uncovered: int
    within_epsilon: bool
    partition: PartitionResult
    approx: ApproxResult


def cover_almost_all(H: GeneralHypergraph, t: int, epsilon: float, gamma: float = 0.1,
                     seed: int = 0, approx: ApproxConfig | None = None,
                     max_retries: int = 50) -> CoverResult:
    """K_t^k-matching of H through a random equipartition and the partite matcher."""
    part = random_equipartition(H, t, seed, max_retries)
    cfg = approx or ApproxConfig.desk(H.n // t, t, epsilon=epsilon, gamma=gamma, seed=seed)
    res = almost_perfect_factor(part.H_prime, cfg)
    cliques = sorted(tuple(sorted(part.to_original[v] for v in c)) for c in res.matching.cliques)
    seen: set[int] = set()
    for c in cliques:
        if seen & set(c) or not all(S in H.edges for S in combinations(c, H.k)):
            raise AssertionError(f"{c} is not a disjoint K_t^k of the input")
        seen.update(c)
    uncovered = H.n - len(seen)
    return CoverResult(cliques, uncovered, uncovered <= epsilon * H.n, part, res)
