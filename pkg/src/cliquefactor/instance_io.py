"""Instance file formats.

Partite instances are stored either as JSON ``{t, k, classSizes, edges}`` with
vertex ids ``"c<i>.v<j>"`` (0-based), or as a plain edge list whose header line
is ``t k n_1 ... n_t`` followed by one edge per line.  General (non-partite)
instances use ``{n, k, edges}`` with integer vertex ids, or an edge list with
header ``n k``.  Lines starting with ``#`` are ignored in edge lists.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .core import GeneralHypergraph, PartiteHypergraph, Vertex, validate, vertex_id

_VID = re.compile(r"^c(\d+)\.v(\d+)$")


class InstanceFormatError(ValueError):
    pass


def parse_vertex(token: str, where: str = "") -> Vertex:
    m = _VID.match(token.strip())
    if not m:
        raise InstanceFormatError(f"{where}bad vertex id {token!r} (expected c<i>.v<j>)")
    return int(m.group(1)), int(m.group(2))


def partite_to_dict(H: PartiteHypergraph) -> dict[str, Any]:
    return {
        "t": H.t,
        "k": H.k,
        "classSizes": list(H.class_sizes),
        "edges": [[vertex_id(v) for v in e] for e in H.sorted_edges()],
    }


def partite_from_dict(data: dict[str, Any]) -> PartiteHypergraph:
    try:
        t, k, sizes = int(data["t"]), int(data["k"]), [int(s) for s in data["classSizes"]]
        raw = data["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"missing or malformed field: {exc}") from None
    edges = []
    for idx, e in enumerate(raw):
        edges.append([parse_vertex(str(v), f"edge {idx}: ") for v in e])
    problems = validate(t, k, sizes, edges)
    if problems:
        raise InstanceFormatError("; ".join(problems[:10]))
    return PartiteHypergraph(t, k, sizes, edges)


def dumps_edge_list(H: PartiteHypergraph) -> str:
    lines = [" ".join(map(str, [H.t, H.k, *H.class_sizes]))]
    lines += [" ".join(vertex_id(v) for v in e) for e in H.sorted_edges()]
    return "\n".join(lines) + "\n"


def loads_edge_list(text: str) -> PartiteHypergraph:
    header = None
    edges: list[list[Vertex]] = []
    sizes: list[int] = []
    t = k = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        where = f"line {lineno}: "
        if header is None:
            try:
                header = [int(x) for x in line.split()]
            except ValueError:
                raise InstanceFormatError(f"{where}header must be integers 't k n1 ... nt'") from None
            if len(header) < 2:
                raise InstanceFormatError(f"{where}header must be 't k n1 ... nt'")
            t, k, sizes = header[0], header[1], header[2:]
            if len(sizes) != t:
                raise InstanceFormatError(f"{where}expected {t} class sizes, got {len(sizes)}")
            continue
        e = [parse_vertex(tok, where) for tok in line.split()]
        problems = validate(t, k, sizes, [e])
        if problems:
            raise InstanceFormatError(where + problems[0].split(": ", 1)[-1])
        edges.append(e)
    if header is None:
        raise InstanceFormatError("empty instance file")
    seen = set()
    for e in edges:
        key = tuple(sorted(e))
        if key in seen:
            raise InstanceFormatError(f"duplicate edge {' '.join(vertex_id(v) for v in key)}")
        seen.add(key)
    return PartiteHypergraph(t, k, sizes, edges)


def load_partite(path: str | Path) -> PartiteHypergraph:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"line {exc.lineno}: {exc.msg}") from None
        return partite_from_dict(data)
    return loads_edge_list(text)


def save_partite(H: PartiteHypergraph, path: str | Path, fmt: str = "json") -> None:
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(partite_to_dict(H), indent=2) + "\n")
    elif fmt == "edgelist":
        path.write_text(dumps_edge_list(H))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def general_to_dict(G: GeneralHypergraph) -> dict[str, Any]:
    return {"n": G.n, "k": G.k, "edges": [list(e) for e in sorted(G.edges)]}


def general_from_dict(data: dict[str, Any]) -> GeneralHypergraph:
    try:
        return GeneralHypergraph(int(data["n"]), int(data["k"]), data["edges"])
    except (KeyError, TypeError) as exc:
        raise InstanceFormatError(f"missing or malformed field: {exc}") from None
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def loads_general_edge_list(text: str) -> GeneralHypergraph:
    n = k = None
    edges: list[tuple[int, ...]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            nums = [int(x) for x in line.split()]
        except ValueError:
            raise InstanceFormatError(f"line {lineno}: expected integers") from None
        if n is None:
            if len(nums) != 2:
                raise InstanceFormatError(f"line {lineno}: header must be 'n k'")
            n, k = nums
            continue
        if len(nums) != k or len(set(nums)) != k or not all(0 <= v < n for v in nums):
            raise InstanceFormatError(f"line {lineno}: expected {k} distinct vertices in [0, {n})")
        edges.append(tuple(sorted(nums)))
    if n is None:
        raise InstanceFormatError("empty instance file")
    if len(set(edges)) != len(edges):
        raise InstanceFormatError("duplicate edge")
    return GeneralHypergraph(n, k, edges)


def load_general(path: str | Path) -> GeneralHypergraph:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"line {exc.lineno}: {exc.msg}") from None
        return general_from_dict(data)
    return loads_general_edge_list(text)
