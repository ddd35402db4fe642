"""Command-line front end.

Every subcommand writes ``result.json`` and ``runrecord.json`` (plus
``instance.json``, or ``scan.csv`` for scans) into ``--out``.  Exit status is
0 for a positive verdict, 1 for a negative one and 2 when the run itself
fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .absorption import AbsorptionConfig, FamilyRetriesExhausted, build_absorbing_family
from .approx import ApproxConfig, CopyInfeasible, CopySamplingError, almost_perfect_factor
from .constructions import GeneratorSpec, generate
from .core import Edge, PartiteHypergraph, min_codegree, vertex_id
from .exact import BudgetExhausted, CountCapExceeded, count_perfect_factors, find_perfect_factor
from .fractional import fraction_str, normalize_certificate, solve_fractional, verify_assignment
from .instance_io import (dumps_edge_list, general_to_dict, load_general, load_partite,
                          partite_to_dict)
from .partition import PartitionRetriesExhausted, random_equipartition
from .pipeline import PipelineConfig, PipelineFailure, ScanConfig, perfect_factor, scan_to_csv, threshold_scan

log = logging.getLogger("cliquefactor")

OK, NEGATIVE, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _clique_ids(c: Edge) -> list[str]:
    return [vertex_id(v) for v in c]


def threads() -> int:
    raw = os.environ.get("CLIQUE_FACTOR_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"CLIQUE_FACTOR_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("CLIQUE_FACTOR_THREADS must be at least 1")
    return value


def _build(cls: type, data: dict, **fixed) -> Any:
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise UsageError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    args = {**data, **fixed}
    if "size_exponents" in args:
        args["size_exponents"] = tuple(args["size_exponents"])
    return cls(**args)


def _echo(cfg: Any) -> Any:
    if dataclasses.is_dataclass(cfg):
        return {f.name: _echo(getattr(cfg, f.name)) for f in dataclasses.fields(cfg)}
    if isinstance(cfg, tuple):
        return list(cfg)
    return cfg


@dataclasses.dataclass
class Outcome:
    code: int
    verdict: str
    result: dict
    config: Any = None
    instance: dict | None = None
    extra: dict[str, str] = dataclasses.field(default_factory=dict)


def _instance(args) -> PartiteHypergraph:
    return load_partite(args.instance)


def cmd_gen(args, cfg: dict) -> Outcome:
    fields = dict(cfg)
    for key in ("t", "k", "n", "mode", "edge_prob", "target", "margin"):
        val = getattr(args, key)
        if val is not None:
            fields[key] = val
    spec = _build(GeneratorSpec, fields, seed=args.seed)
    H, info = generate(spec)
    extra = {"instance.txt": dumps_edge_list(H)} if args.format == "edgelist" else {}
    return Outcome(OK, "generated", {"spec": _echo(spec), "info": info,
                                     "edges": len(H.edges)}, spec, partite_to_dict(H), extra)


def cmd_check(args, cfg: dict) -> Outcome:
    H = _instance(args)
    rep = min_codegree(H)
    result = {"t": H.t, "k": H.k, "classSizes": list(H.class_sizes), "balanced": H.balanced,
              "edges": len(H.edges), "minCodegree": rep.value,
              "perIndex": {",".join(map(str, I)): v for I, v in sorted(rep.per_index.items())}}
    if rep.witness is not None:
        T, J = rep.witness
        result["witness"] = {"T": _clique_ids(T), "J": list(J)}
    return Outcome(OK, "valid", result, None, partite_to_dict(H))


def cmd_lp(args, cfg: dict) -> Outcome:
    H = _instance(args)
    res = solve_fractional(H, clique_cap=cfg.get("clique_cap", 50_000))
    out: dict = {"status": res.status, "cliqueCount": res.clique_count, "pivots": res.pivots}
    if res.feasible:
        assert verify_assignment(H, res.assignment).ok
        out["assignment"] = [{"clique": _clique_ids(T), "weight": fraction_str(w)}
                             for T, w in sorted(res.assignment.weights.items()) if w]
        code = OK
    else:
        cert = normalize_certificate(H, res.certificate) if args.normalize else res.certificate
        out["certificate"] = {"form": cert.form, "total": fraction_str(cert.total),
                              "weights": {vertex_id(v): fraction_str(Fraction(w))
                                          for v, w in sorted(cert.weights.items())}}
        code = NEGATIVE
    return Outcome(code, res.status, out, {"clique_cap": cfg.get("clique_cap", 50_000),
                                           "normalize": args.normalize}, partite_to_dict(H))


def cmd_exact(args, cfg: dict) -> Outcome:
    H = _instance(args)
    budget = int(cfg.get("budget", args.budget))
    out: dict = {}
    try:
        M = find_perfect_factor(H, budget)
    except BudgetExhausted as exc:
        out = {"status": "budget", "matching": None, "nodes": exc.nodes}
        return Outcome(NEGATIVE, "budget", out, {"budget": budget}, partite_to_dict(H))
    if M is None:
        out = {"status": "none", "matching": None}
        code = NEGATIVE
    else:
        out = {"status": "found", "matching": [_clique_ids(c) for c in M.cliques]}
        code = OK
    if args.count:
        try:
            out["count"] = count_perfect_factors(H, cap=args.count_cap, budget=budget)
        except CountCapExceeded as exc:
            out["countLowerBound"] = exc.lower_bound
        except BudgetExhausted:
            out["count"] = None
    return Outcome(code, out["status"], out, {"budget": budget, "count": args.count},
                   partite_to_dict(H))


def cmd_absorb(args, cfg: dict) -> Outcome:
    H = _instance(args)
    acfg = _build(AbsorptionConfig, cfg, seed=args.seed)
    try:
        fam = build_absorbing_family(H, acfg)
    except FamilyRetriesExhausted as exc:
        return Outcome(NEGATIVE, "retries-exhausted",
                       {"status": "retries-exhausted", "diagnostics": exc.diagnostics},
                       acfg, partite_to_dict(H))
    out = {"status": "ok", "members": [_clique_ids(A) for A in fam.members],
           "matchings": [[_clique_ids(c) for c in M.cliques] for M in fam.matchings],
           "audit": fam.audit, "attempts": fam.attempts,
           "leftoverCapacity": fam.leftover_capacity}
    return Outcome(OK, "ok", out, acfg, partite_to_dict(H))


def cmd_approx(args, cfg: dict) -> Outcome:
    H = _instance(args)
    base = ApproxConfig.desk(H.n, H.t) if args.desk else ApproxConfig()
    fields = {**_echo(base), **cfg}
    acfg = _build(ApproxConfig, fields, seed=args.seed)
    try:
        res = almost_perfect_factor(H, acfg)
    except (CopyInfeasible, CopySamplingError) as exc:
        return Outcome(NEGATIVE, "failed", {"status": "failed", "error": str(exc)},
                       acfg, partite_to_dict(H))
    out = res.to_dict()
    out["matching"] = [_clique_ids(c) for c in res.matching.cliques]
    ok = res.uncovered <= acfg.epsilon * H.num_vertices
    out["status"] = "ok" if ok else "above-epsilon"
    return Outcome(OK if ok else NEGATIVE, out["status"], out, acfg, partite_to_dict(H))


def cmd_partition(args, cfg: dict) -> Outcome:
    G = load_general(args.instance)
    t = int(cfg.get("t", args.t))
    retries = int(cfg.get("max_retries", 50))
    try:
        res = random_equipartition(G, t, args.seed, retries)
    except PartitionRetriesExhausted as exc:
        return Outcome(NEGATIVE, "retries-exhausted",
                       {"status": "retries-exhausted", "diagnostics": exc.diagnostics},
                       {"t": t, "max_retries": retries}, general_to_dict(G))
    out = res.to_dict()
    out["status"] = "ok"
    out["margins"] = {k: round(v, 9) for k, v in sorted(res.margins.items())}
    return Outcome(OK, "ok", out, {"t": t, "max_retries": retries}, general_to_dict(G))


def _pipeline_config(cfg: dict, seed: int) -> PipelineConfig:
    fields = dict(cfg)
    if "absorption" in fields and fields["absorption"] is not None:
        fields["absorption"] = _build(AbsorptionConfig, fields["absorption"])
    if "approx" in fields and fields["approx"] is not None:
        fields["approx"] = _build(ApproxConfig, fields["approx"])
    return _build(PipelineConfig, fields, seed=seed)


def cmd_pipeline(args, cfg: dict) -> Outcome:
    H = _instance(args)
    pcfg = _pipeline_config(cfg, args.seed)
    try:
        res = perfect_factor(H, pcfg)
    except PipelineFailure as exc:
        return Outcome(NEGATIVE, "failed", {"status": "failed", "diagnostics": exc.diagnostics},
                       pcfg, partite_to_dict(H))
    out = {"status": "ok", "factor": [_clique_ids(c) for c in res.factor.cliques],
           "attempts": res.attempts, "familySize": res.family_size,
           "leftover": res.leftover, "diagnostics": res.diagnostics}
    return Outcome(OK, "ok", out, pcfg, partite_to_dict(H))


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def cmd_scan(args, cfg: dict) -> Outcome:
    fields = dict(cfg)
    for key in ("t", "k", "n_range", "grid"):
        fields.pop(key, None)
    if fields.get("pipeline_config") is not None:
        fields["pipeline_config"] = _pipeline_config(fields["pipeline_config"], 0)
    if args.samples is not None:
        fields["samples"] = args.samples
    fields.setdefault("timing", args.timing)
    scfg = _build(ScanConfig, fields, workers=threads())
    t = int(cfg.get("t", args.t))
    k = int(cfg.get("k", args.k))
    n_range = cfg.get("n_range") or _int_list(args.n_range)
    grid = cfg.get("grid") or _int_list(args.grid)
    rows = threshold_scan(t, k, n_range, grid, args.seed, scfg)
    echo = {"t": t, "k": k, "n_range": list(n_range), "grid": list(grid),
            **{k_: v for k_, v in _echo(scfg).items() if k_ != "workers"}}
    return Outcome(OK, "ok", {"cells": len(rows), "columns": list(rows[0]) if rows else []},
                   echo, None, {"scan.csv": scan_to_csv(rows)})


COMMANDS: dict[str, Callable] = {
    "gen": cmd_gen, "check": cmd_check, "lp": cmd_lp, "exact": cmd_exact,
    "absorb": cmd_absorb, "approx": cmd_approx, "partition": cmd_partition,
    "pipeline": cmd_pipeline, "scan": cmd_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", type=Path, help="JSON file of configuration fields")
    common.add_argument("--out", type=Path, default=Path("out"), help="artifact directory")
    common.add_argument("--timing", action="store_true",
                        help="record wall-clock times (artifacts are then not reproducible)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cliquefactor",
                                description="Clique factors of balanced partite hypergraphs")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("--t", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--mode", choices=["complete", "extremal", "uniformRandom", "minCodegreeTarget"])
    g.add_argument("--edge-prob", dest="edge_prob", type=float)
    g.add_argument("--target", type=int)
    g.add_argument("--margin", type=float)
    g.add_argument("--format", choices=["json", "edgelist"], default="json")

    for name, helptext in [("check", "validate and report codegrees"),
                           ("lp", "perfect fractional factor or Farkas certificate"),
                           ("exact", "exact perfect factor search"),
                           ("absorb", "build an absorbing family"),
                           ("approx", "near-perfect matching by randomization"),
                           ("pipeline", "perfect factor by absorption"),
                           ("partition", "random equipartition of a general k-graph")]:
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("instance", type=Path)
        if name == "lp":
            s.add_argument("--normalize", action="store_true",
                           help="emit the [0, 1] form of the certificate")
        elif name == "exact":
            s.add_argument("--budget", type=int, default=10_000_000)
            s.add_argument("--count", action="store_true")
            s.add_argument("--count-cap", dest="count_cap", type=int, default=None)
        elif name == "approx":
            s.add_argument("--desk", action="store_true",
                           help="start from the desk-scale copy parameters")
        elif name == "partition":
            s.add_argument("--t", type=int, default=3)

    sc = sub.add_parser("scan", parents=[common], help="threshold scan to CSV")
    sc.add_argument("--t", type=int, default=3)
    sc.add_argument("--k", type=int, default=2)
    sc.add_argument("--n-range", dest="n_range", default="3,6",
                    help="comma list, ranges as lo:hi")
    sc.add_argument("--grid", default="0:3", help="codegree targets, comma list or lo:hi")
    sc.add_argument("--samples", type=int)
    return p


def _instance_hash(instance: dict | None) -> str | None:
    if instance is None:
        return None
    canon = json.dumps(instance, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = json.loads(args.config.read_text()) if args.config else {}
        if not isinstance(cfg, dict):
            raise UsageError("--config must hold a JSON object")
        threads()
        outcome = COMMANDS[args.command](args, cfg)
    except (UsageError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    elapsed = time.perf_counter() - start

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    written = ["result.json"]
    if outcome.instance is not None:
        (out / "instance.json").write_text(_dump(outcome.instance))
        written.insert(0, "instance.json")
    (out / "result.json").write_text(_dump(outcome.result))
    for name, text in sorted(outcome.extra.items()):
        (out / name).write_text(text)
        written.append(name)
    record = {"subcommand": args.command, "seed": args.seed, "config": _echo(outcome.config),
              "instanceHash": _instance_hash(outcome.instance), "outputs": written,
              "verdict": outcome.verdict, "exitCode": outcome.code}
    if args.timing:
        record["wallClock"] = round(elapsed, 6)
    (out / "runrecord.json").write_text(_dump(record))
    print(f"{args.command}: {outcome.verdict} -> {out}")
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
