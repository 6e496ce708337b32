"""Text formats.

Edge list: first line ``n m``, then ``u v w`` per edge, 0-indexed, canonical
``u < v``, sorted. Distributed graph: the edge-list header gains
``s=<sites> dup=<0|1>`` and each edge line gains ``sites=i,j,k r=<prob>``.
Partition: one ``vertex cluster`` pair per line.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

from .comm import DistributedGraph
from .graph import Graph, Partition


def fmt_num(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(x)


def _lines(path_or_text):
    if isinstance(path_or_text, os.PathLike):
        text = Path(path_or_text).read_text()
    elif "\n" not in path_or_text and path_or_text.strip() and Path(path_or_text).is_file():
        text = Path(path_or_text).read_text()
    else:
        text = str(path_or_text)
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def format_edgelist(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v} {fmt_num(w)}" for u, v, w in g.edges())
    return "\n".join(out) + "\n"


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_text(format_edgelist(g))


def read_edgelist(path_or_text) -> Graph:
    lines = _lines(path_or_text)
    if not lines:
        raise ValueError("empty edge list")
    head = lines[0].split()
    n, m = int(head[0]), int(head[1])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        w = float(parts[2]) if len(parts) > 2 and "=" not in parts[2] else 1.0
        edges.append((int(parts[0]), int(parts[1]), w))
    if len(edges) != m:
        raise ValueError(f"header declares {m} edges but {len(edges)} follow")
    return Graph(n, edges, weight_exponent=None)


def is_distributed(path_or_text) -> bool:
    lines = _lines(path_or_text)
    return bool(lines) and any(tok.startswith("s=") for tok in lines[0].split()[2:])


def format_distributed(dg: DistributedGraph) -> str:
    g = dg.base
    holders = dg.sites_of()
    out = [f"{g.n} {g.m} s={dg.s} dup={int(dg.duplication)}"]
    for u, v, w in g.edges():
        sites = ",".join(str(i) for i in holders[(u, v)])
        out.append(f"{u} {v} {fmt_num(w)} sites={sites} r={dg.residence_prob[(u, v)]!r}")
    return "\n".join(out) + "\n"


def write_distributed(dg: DistributedGraph, path) -> None:
    Path(path).write_text(format_distributed(dg))


def read_distributed(path_or_text) -> DistributedGraph:
    lines = _lines(path_or_text)
    head = lines[0].split()
    n, m = int(head[0]), int(head[1])
    opts = dict(tok.split("=", 1) for tok in head[2:])
    s = int(opts["s"])
    dup = opts.get("dup", "1") != "0"
    edges, sites, resid = [], [[] for _ in range(s)], {}
    for ln in lines[1:]:
        parts = ln.split()
        u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        kv = dict(tok.split("=", 1) for tok in parts[3:])
        edges.append((u, v, w))
        key = (min(u, v), max(u, v))
        for i in kv["sites"].split(","):
            sites[int(i)].append(key)
        resid[key] = float(kv.get("r", 1.0))
    if len(edges) != m:
        raise ValueError(f"header declares {m} edges but {len(edges)} follow")
    return DistributedGraph(Graph(n, edges, weight_exponent=None), s, sites, resid, dup)


def write_partition(p: Partition, path) -> None:
    Path(path).write_text("".join(f"{v} {c}\n" for v, c in enumerate(p.assignment.tolist())))


def read_partition(path_or_text, k: int | None = None) -> Partition:
    pairs = sorted((int(a), int(b)) for a, b in (ln.split()[:2] for ln in _lines(path_or_text)))
    if [v for v, _ in pairs] != list(range(len(pairs))):
        raise ValueError("partition must list every vertex 0..n-1 exactly once")
    return Partition([c for _, c in pairs], k)


def write_rprime(r_prime: dict, path) -> None:
    rows = sorted(r_prime.items())
    Path(path).write_text("".join(f"{u} {v} {r!r}\n" for (u, v), r in rows))


def write_bundle(bundle, prefix) -> Path:
    """One edge-list file per level plus a JSON manifest listing them in order."""
    prefix = Path(prefix)
    files = []
    for i, level in enumerate(bundle.levels, start=1):
        f = prefix.with_name(f"{prefix.name}.level{i}.el")
        write_edgelist(level, f)
        files.append(f.name)
    manifest = prefix.with_name(f"{prefix.name}.manifest.json")
    manifest.write_text(json.dumps({"t": bundle.t, "levels": files}, indent=2) + "\n")
    return manifest


def read_bundle_levels(manifest) -> list[Graph]:
    manifest = Path(manifest)
    data = json.loads(manifest.read_text())
    return [read_edgelist(manifest.with_name(name)) for name in data["levels"]]
