"""Perfect K_t^k-factors by absorption: set aside an absorbing family U, match
almost all of H - U, then absorb what is left."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import ceil, floor
from typing import Iterable, Sequence

from .absorption import (AbsorptionConfig, AbsorptionFailure, FamilyRetriesExhausted,
                         absorb_leftover, build_absorbing_family)
from .approx import ApproxConfig, CopyInfeasible, CopySamplingError, almost_perfect_factor
from .constructions import (GeneratorSpec, extremal_fractional, extremal_size,
                            random_with_min_codegree)
from .core import PartiteHypergraph
from .exact import BudgetExhausted, Matching, find_perfect_factor, verify_matching
from .rng import derive_seed

log = logging.getLogger(__name__)


class PipelineFailure(RuntimeError):
    def __init__(self, msg: str, diagnostics: list[str]):
        super().__init__(msg)
        self.diagnostics = diagnostics


def default_leftover_capacity(t: int, n: int, gamma: float) -> int:
    """gamma^(2t(t-1)) n / (t^2 2^(2t+5)) rounded down to a multiple of t, or
    t * ceil(0.02 n) when that rounds to nothing."""
    raw = gamma ** (2 * t * (t - 1)) * n / (t * t * 2 ** (2 * t + 5))
    cap = t * floor(raw / t)
    return cap if cap >= t else t * ceil(0.02 * n)


@dataclass
class PipelineConfig:
    gamma: float = 0.1
    absorption: AbsorptionConfig | None = None
    approx: ApproxConfig | None = None
    leftover_capacity: int | None = None
    max_outer_retries: int = 5
    polish: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.leftover_capacity is not None and (
                self.leftover_capacity < 0 or self.leftover_capacity % 1):
            raise ValueError("leftover capacity must be a nonnegative integer")
        if self.max_outer_retries < 1:
            raise ValueError("need at least one outer attempt")

    def capacity(self, t: int, n: int) -> int:
        cap = self.leftover_capacity
        if cap is None:
            cap = default_leftover_capacity(t, n, self.gamma)
        if cap % t:
            raise ValueError(f"leftover capacity {cap} is not divisible by t={t}")
        return cap

    def epsilon(self, t: int, n: int) -> float:
        return self.capacity(t, n) / (t * n)


@dataclass
class PipelineResult:
    factor: Matching
    attempts: int
    family_size: int
    leftover: int
    diagnostics: list[str] = field(default_factory=list)


def _attempt(H: PartiteHypergraph, cfg: PipelineConfig, seed: int, cap: int) -> tuple[Matching, int, int]:
    t = H.t
    acfg = replace(cfg.absorption or AbsorptionConfig(gamma=cfg.gamma),
                   leftover_capacity=cap, seed=seed)
    fam = build_absorbing_family(H, acfg)
    U = fam.U
    rest = [v for v in H.vertices() if v not in U]
    sub, back = H.induced(rest)
    if sub.n == 0:
        approx = Matching()
        leftover = []
    else:
        eps = min(0.999, max(cap, 1) / sub.num_vertices)
        base = cfg.approx or ApproxConfig.desk(sub.n, t)
        if base.copy_size is not None and base.copy_size > sub.n:
            base = replace(base, copy_size=sub.n)
        acfg2 = replace(base, epsilon=eps, gamma=cfg.gamma, seed=seed, polish=cfg.polish)
        res = almost_perfect_factor(sub, acfg2)
        approx = res.matching.relabel(back)
        covered = approx.vertices()
        leftover = [back[v] for v in sub.vertices() if back[v] not in covered]
    per_class = [sum(1 for v in leftover if v[0] == c) for c in range(t)]
    assert len(set(per_class)) == 1, "leftover is unbalanced"
    if len(leftover) > cap:
        raise AbsorptionFailure(f"leftover {len(leftover)} exceeds capacity {cap}")
    closing = absorb_leftover(H, fam, leftover, acfg.exact_fallback)
    return approx + closing, len(fam.members), len(leftover)


def perfect_factor(H: PartiteHypergraph, cfg: PipelineConfig | None = None) -> PipelineResult:
    """Verified perfect K_t^k-factor of H, or PipelineFailure after all retries."""
    cfg = cfg or PipelineConfig()
    if not H.balanced:
        raise ValueError("perfect_factor needs a balanced host")
    t, n = H.t, H.n
    cap = cfg.capacity(t, n)
    diagnostics: list[str] = []
    for r in range(cfg.max_outer_retries):
        seed = cfg.seed + r
        try:
            M, fam_size, left = _attempt(H, cfg, seed, cap)
        except FamilyRetriesExhausted as exc:
            diagnostics.append(f"retry {r}: absorbing family: {exc}")
            continue
        except (CopyInfeasible, CopySamplingError) as exc:
            diagnostics.append(f"retry {r}: near-perfect matching: {exc}")
            continue
        except (AbsorptionFailure, ValueError) as exc:
            diagnostics.append(f"retry {r}: absorption: {exc}")
            continue
        rep = verify_matching(H, M, perfect=True)
        if rep.ok:
            return PipelineResult(M, r + 1, fam_size, left, diagnostics)
        diagnostics.append(f"retry {r}: result failed verification: {rep.problems[:2]}")
    raise PipelineFailure(f"no perfect factor after {cfg.max_outer_retries} attempts",
                          diagnostics)


SCAN_COLUMNS = ["t", "k", "n", "deltaTilde", "samples", "exactSuccess",
                "pipelineSuccess", "meanRuntimeMs"]


@dataclass
class ScanConfig:
    samples: int = 5
    exact: bool = True
    pipeline: bool = True
    exact_max_vertices: int = 36
    exact_budget: int = 2_000_000
    timing: bool = False
    margin: float = 0.05
    pipeline_config: PipelineConfig | None = None
    workers: int = 1


def _rate(hits: Sequence[bool]) -> str:
    return f"{sum(hits) / len(hits):.4f}" if hits else "NA"


def _scan_cell(t: int, k: int, n: int, d: int, seed: int, cfg: ScanConfig) -> dict:
    if not 0 <= d <= n:
        raise ValueError(f"codegree target {d} outside [0, {n}]")
    w = extremal_size(t, k, n)
    exact_hits: list[bool] = []
    pipe_hits: list[bool] = []
    times: list[float] = []
    for s in range(cfg.samples):
        if s == 0 and d == w:
            H = extremal_fractional(t, k, n)
        else:
            sub = derive_seed(seed, "scan", n, d, s)
            H, _ = random_with_min_codegree(
                GeneratorSpec(t, k, n, "minCodegreeTarget", target=d, seed=sub,
                              margin=cfg.margin))
        start = time.perf_counter()
        if cfg.exact and t * n <= cfg.exact_max_vertices:
            try:
                exact_hits.append(find_perfect_factor(H, cfg.exact_budget) is not None)
            except BudgetExhausted:
                exact_hits.append(False)
        if cfg.pipeline:
            pcfg = replace(cfg.pipeline_config or PipelineConfig(),
                           seed=derive_seed(seed, "scan-pipeline", n, d, s))
            try:
                perfect_factor(H, pcfg)
                pipe_hits.append(True)
            except PipelineFailure:
                pipe_hits.append(False)
        times.append((time.perf_counter() - start) * 1000)
    return {"t": t, "k": k, "n": n, "deltaTilde": d, "samples": cfg.samples,
            "exactSuccess": _rate(exact_hits), "pipelineSuccess": _rate(pipe_hits),
            "meanRuntimeMs": f"{sum(times) / len(times):.1f}" if cfg.timing and times else "NA"}


def threshold_scan(t: int, k: int, n_range: Iterable[int], grid: Iterable[int],
                   seed: int = 0, cfg: ScanConfig | None = None) -> list[dict]:
    """Success rates per (n, codegree target) cell.

    The cell whose target equals the extremal instance's codegree evaluates
    that instance as its first sample.  Exact search runs when t n is at most
    ``exact_max_vertices``; a budget overrun counts as a miss.  Cells are
    independent, so ``cfg.workers > 1`` spreads them over processes without
    changing the output.  Targets above n are skipped for that n.
    """
    cfg = cfg or ScanConfig()
    grid = list(grid)
    if any(d < 0 for d in grid):
        raise ValueError("codegree targets must be nonnegative")
    cells = [(t, k, n, d, seed, cfg) for n in n_range for d in grid if d <= n]
    if cfg.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_scan_cell, *zip(*cells)))
    return [_scan_cell(*c) for c in cells]


def scan_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
