"""Perfect fractional K_t^k-matchings and Farkas certificates, in exact arithmetic.

The feasibility system has one variable per clique and one equality per
vertex (the clique weights through each vertex sum to 1).  It is decided by a
revised phase-one simplex on integer rows with per-row denominators,
pivoting by Bland's smallest-index rule.  When the artificial optimum is positive, the
terminal duals give a vertex weighting whose clique sums are all nonnegative
while its total is negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, gcd
from typing import Sequence

from .constructions import extremal_size
from .core import Edge, PartiteHypergraph, Report, Vertex, enumerate_cliques

DEFAULT_CLIQUE_CAP = 50_000


@dataclass
class FractionalAssignment:
    weights: dict[Edge, Fraction] = field(default_factory=dict)

    @property
    def size(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def support(self) -> list[Edge]:
        return sorted(T for T, w in self.weights.items() if w)


@dataclass
class FarkasCertificate:
    """Vertex weighting; ``form`` is ``"raw"`` (sums >= 0, total < 0) or
    ``"normalized"`` (values in [0, 1], sums >= 1, total < n)."""

    weights: dict[Vertex, Fraction]
    form: str = "raw"

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))


@dataclass
class LPResult:
    status: str  # "feasible" | "infeasible"
    assignment: FractionalAssignment | None = None
    certificate: FarkasCertificate | None = None
    clique_count: int = 0
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


class _RevisedSimplex:
    """Phase one over the basis inverse.

    Row i of ``rows`` holds ``[B^-1 | B^-1 b]`` scaled by ``den[i] > 0``.  The
    dual row ``zrow / zden`` holds the reduced costs of the artificial columns
    followed by minus the objective.  Clique columns are priced on the fly.
    """

    def __init__(self, cols: list[list[int]], nrows: int):
        self.cols = cols
        self.nx = len(cols)
        self.rows = [[0] * (nrows + 1) for _ in range(nrows)]
        for i in range(nrows):
            self.rows[i][i] = 1
            self.rows[i][-1] = 1
        self.den = [1] * nrows
        self.basis = [self.nx + i for i in range(nrows)]
        self.zrow = [0] * nrows + [-nrows]
        self.zden = 1
        self.pivots = 0

    @staticmethod
    def _reduce(row: list[int], den: int) -> tuple[list[int], int]:
        g = gcd(den, *row)
        if g > 1:
            row = [x // g for x in row]
            den //= g
        return row, den

    def _price(self, j: int) -> int:
        """Reduced cost of clique column j, scaled by ``zden``."""
        col = self.cols[j]
        z = self.zrow
        return sum(z[v] for v in col) - len(col) * self.zden

    def run(self) -> None:
        nx = self.nx
        while True:
            enter = next((j for j in range(nx) if self._price(j) < 0), None)
            if enter is None:
                return
            col = self.cols[enter]
            d = [sum(R[v] for v in col) for R in self.rows]
            best = None
            for i, a in enumerate(d):
                if a <= 0:
                    continue
                if best is None:
                    best = i
                    continue
                lhs = self.rows[i][-1] * d[best]
                rhs = self.rows[best][-1] * a
                if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                    best = i
            if best is None:  # phase one is bounded below by 0
                raise RuntimeError("unbounded phase-one problem")
            self._pivot(best, enter, d)

    def _pivot(self, r: int, enter: int, d: list[int]) -> None:
        P = self.rows[r]
        a = d[r]
        for i, R in enumerate(self.rows):
            b = d[i]
            if i == r or not b:
                continue
            self.rows[i], self.den[i] = self._reduce(
                [a * x - b * y for x, y in zip(R, P)], self.den[i] * a)
        zc = self._price(enter)
        self.zrow, self.zden = self._reduce(
            [a * x - zc * y for x, y in zip(self.zrow, P)], self.zden * a)
        self.rows[r], self.den[r] = self._reduce(list(P), a)
        self.basis[r] = enter
        self.pivots += 1

    def objective(self) -> Fraction:
        return Fraction(-self.zrow[-1], self.zden)


def _uncovered_certificate(H: PartiteHypergraph, cliques: list[Edge]) -> FarkasCertificate | None:
    covered = {v for T in cliques for v in T}
    if all(v in covered for v in H.vertices()):
        return None
    return FarkasCertificate({v: Fraction(0 if v in covered else -1)
                              for v in H.vertices()}, "raw")


def solve_fractional(H: PartiteHypergraph, clique_cap: int = DEFAULT_CLIQUE_CAP,
                     row_order: Sequence[Vertex] | None = None) -> LPResult:
    """Decide whether H has a perfect fractional K_t^k-matching.

    Returns a verified-by-construction assignment or a raw Farkas certificate.
    ``row_order`` permutes the constraint rows; the verdict does not depend on it.
    """
    if not H.balanced:
        raise ValueError("solve_fractional needs a balanced hypergraph")
    cliques = enumerate_cliques(H, cap=clique_cap)
    if H.num_vertices == 0:
        return LPResult("feasible", FractionalAssignment({}), None, 0, 0)
    cert = _uncovered_certificate(H, cliques)
    if cert is not None:
        return LPResult("infeasible", None, cert, len(cliques), 0)
    verts = list(row_order) if row_order is not None else H.vertices()
    if sorted(verts) != H.vertices():
        raise ValueError("row_order must be a permutation of the vertices")
    row_of = {v: i for i, v in enumerate(verts)}
    tab = _RevisedSimplex([[row_of[v] for v in T] for T in cliques], len(verts))
    tab.run()
    if tab.objective() == 0:
        weights = {T: Fraction(0) for T in cliques}
        for i, j in enumerate(tab.basis):
            if j < tab.nx:
                weights[cliques[j]] = Fraction(tab.rows[i][-1], tab.den[i])
        return LPResult("feasible", FractionalAssignment(weights), None, len(cliques), tab.pivots)
    # dual y_v = 1 - (reduced cost of artificial v); certificate is -y
    weights = {v: Fraction(tab.zrow[row_of[v]], tab.zden) - 1 for v in H.vertices()}
    return LPResult("infeasible", None, FarkasCertificate(weights, "raw"),
                    len(cliques), tab.pivots)


def verify_assignment(H: PartiteHypergraph, a: FractionalAssignment,
                      perfect: bool = True) -> Report:
    rep = Report()
    load = {v: Fraction(0) for v in H.vertices()}
    for T, w in a.weights.items():
        if not 0 <= w <= 1:
            rep.problems.append(f"weight {w} of {T} outside [0, 1]")
        if not H.is_clique(T) or len(T) != H.t:
            rep.problems.append(f"{T} is not a K_t^k of the host")
            continue
        for v in T:
            load[v] += w
    for v, s in load.items():
        if s > 1:
            rep.problems.append(f"load {s} at {v} exceeds 1")
        elif perfect and s != 1:
            rep.problems.append(f"load {s} at {v} is not 1")
    size = a.size
    if perfect and H.balanced and size != H.n:
        rep.problems.append(f"size {size} differs from n={H.n}")
    rep.details["size"] = size
    return rep


def verify_certificate(H: PartiteHypergraph, c: FarkasCertificate,
                       cliques: list[Edge] | None = None) -> Report:
    rep = Report()
    verts = H.vertices()
    missing = [v for v in verts if v not in c.weights]
    if missing:
        rep.problems.append(f"weights missing for {len(missing)} vertices")
        return rep
    if c.form not in ("raw", "normalized"):
        rep.problems.append(f"unknown certificate form {c.form!r}")
        return rep
    bound = Fraction(0) if c.form == "raw" else Fraction(1)
    cliques = H.cliques if cliques is None else cliques
    worst = None
    for T in cliques:
        s = sum((c.weights[v] for v in T), Fraction(0))
        if worst is None or s < worst:
            worst = s
        if s < bound:
            rep.problems.append(f"clique {T} has weight {s} < {bound}")
            if len(rep.problems) > 20:
                break
    total = sum((c.weights[v] for v in verts), Fraction(0))
    limit = Fraction(0) if c.form == "raw" else Fraction(H.n if H.balanced else 0)
    if not total < limit:
        rep.problems.append(f"total weight {total} is not < {limit}")
    if c.form == "normalized":
        out = [v for v in verts if not 0 <= c.weights[v] <= 1]
        if out:
            rep.problems.append(f"{len(out)} weights outside [0, 1]")
    rep.details.update(total=total, min_clique_sum=worst)
    return rep


def normalize_certificate(H: PartiteHypergraph, c: FarkasCertificate) -> FarkasCertificate:
    """Map a raw certificate to the [0, 1] form (sums >= 1, total < n).

    Shift weight between classes until every class minimum is equal (clique
    sums and the total are unchanged because each clique and the total meet
    every class equally), scale the common minimum to -1, cap at t-1 and
    apply w -> (w + 1)/t.
    """
    if c.form != "raw":
        raise ValueError("expected a raw certificate")
    if not H.balanced:
        raise ValueError("normalization needs a balanced host")
    if not verify_certificate(H, c).ok:
        raise ValueError("input is not a valid raw certificate")
    t = H.t
    by_class = [[v for v in H.vertices() if v[0] == i] for i in range(t)]
    minima = [min(c.weights[v] for v in vs) for vs in by_class]
    common = sum(minima, Fraction(0)) / t
    if common >= 0:
        raise ValueError("degenerate certificate: class minima are nonnegative")
    scale = -1 / common
    out: dict[Vertex, Fraction] = {}
    for i, vs in enumerate(by_class):
        for v in vs:
            w = (c.weights[v] - minima[i] + common) * scale
            w = min(w, Fraction(t - 1))
            out[v] = (w + 1) / t
    return FarkasCertificate(out, "normalized")


def extremal_certificate(t: int, k: int, n: int) -> FarkasCertificate:
    """The weighting (k-1)/(t-k+1) on the W_i prefixes and -1 elsewhere."""
    if not 2 <= k <= t or n < 1:
        raise ValueError(f"invalid parameters t={t}, k={k}, n={n}")
    w = extremal_size(t, k, n)
    if w + 1 < 1:
        raise ValueError("ceil((t-k+1)n/t) must be at least 1")
    high = Fraction(k - 1, t - k + 1)
    return FarkasCertificate({(i, p): (high if p < w else Fraction(-1))
                              for i in range(t) for p in range(n)}, "raw")


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


def fractional_threshold_bounds(t: int, k: int, n: int) -> tuple[int, int]:
    """Known (lower, upper) bounds on the perfect-fractional codegree threshold."""
    if not 2 <= k <= t or n < 1:
        raise ValueError(f"invalid parameters t={t}, k={k}, n={n}")
    lower = ceil((t - k + 1) * n / t)
    if k == 2:
        upper = ceil((t - 1) * n / t)
    else:
        upper = ceil((1 - Fraction(1, comb(t - 1, k - 1))) * n) + 1
    return lower, upper
