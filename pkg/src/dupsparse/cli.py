"""Command-line experiment harness.

Every subcommand reads and writes the text formats in :mod:`dupsparse.io`.
Output goes to ``-o PATH`` or stdout. ``--config FILE.json`` supplies
defaults for any option of the chosen subcommand (keys are option names with
dashes or underscores); explicit flags override it.

Exit codes: 0 success or check passed, 1 check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import io
from .cluster import distributed_cluster, match_and_score, spectral_clustering
from .comm import CSV_COLUMNS, DistributedGraph, Model, distribute, meter_for, parse_policy
from .errors import DupSparseError
from .graph import gen_sbm, gen_unit_random, gen_weighted_random
from .sparsifier import sparsify_run
from .spanner import bfs_blackboard, plus2_spanner, spanner_dup, t_bundle
from .verify import (check_conductance_preservation, check_spectral_sparsifier,
                     check_stretch)

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2
SWEEP_ALGORITHMS = ("spanner", "plus2", "bfs", "sparsify")


class UsageError(Exception):
    pass



def _ints(text: str) -> list[int]:
    out = []
    for part in str(text).split(","):
        if "-" in part.strip("-"):
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_distributed(path, s, policy, seed) -> DistributedGraph:
    """A distributed file as-is, or a plain edge list distributed on the fly."""
    if io.is_distributed(path):
        return io.read_distributed(path)
    g = io.read_edgelist(path)
    return distribute(g, s, parse_policy(policy), seed)


def _require_file(path) -> None:
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")


# -- subcommands ------------------------------------------------------------------
def cmd_gen(a) -> int:
    if a.kind == "sbm":
        if len(a.params) != 3:
            raise UsageError("gen sbm SIZES P_IN P_OUT")
        sizes = _ints(a.params[0])
        g, truth = gen_sbm(sizes, float(a.params[1]), float(a.params[2]), a.seed)
        if a.truth:
            io.write_partition(truth, a.truth)
    elif a.kind == "random":
        if len(a.params) != 3:
            raise UsageError("gen random N M W_MAX")
        n, m, w = (int(x) for x in a.params)
        g = gen_weighted_random(n, m, w, a.seed)
    else:
        if len(a.params) != 2:
            raise UsageError("gen unit N M")
        g = gen_unit_random(int(a.params[0]), int(a.params[1]), a.seed)
    _emit(io.format_edgelist(g), a.out)
    return EXIT_OK


def cmd_distribute(a) -> int:
    _require_file(a.input)
    g = io.read_edgelist(a.input)
    dg = distribute(g, a.s, parse_policy(a.policy), a.seed)
    _emit(io.format_distributed(dg), a.out)
    return EXIT_OK


def _write_meter(meter, path, algorithm, m, seed) -> None:
    if path:
        Path(path).write_text(json.dumps(meter.csv_row(algorithm, m, seed), indent=2) + "\n")


def cmd_spanner(a) -> int:
    _require_file(a.input)
    dg = _load_distributed(a.input, a.s, a.policy, a.seed)
    model = Model.BLACKBOARD if a.alg == "plus2" else Model.parse(a.model)
    meter = meter_for(dg, model)
    if a.alg == "dup":
        h = spanner_dup(dg, a.k, model, meter, mp_delta=a.mp_delta)
    elif a.alg == "plus2":
        h = plus2_spanner(dg, a.delta, meter, a.seed)
    else:
        if a.out in (None, "-"):
            raise UsageError("--alg bundle needs -o PREFIX for its level files")
        bundle, residual = t_bundle(dg, a.t, a.k, model, meter)
        io.write_bundle(bundle, a.out)
        io.write_edgelist(residual.base, f"{a.out}.residual.el")
        _write_meter(meter, a.meter, "bundle", dg.base.m, a.seed)
        return EXIT_OK
    _emit(io.format_edgelist(h), a.out)
    _write_meter(meter, a.meter, f"spanner-{a.alg}", dg.base.m, a.seed)
    return EXIT_OK


def cmd_bfs(a) -> int:
    _require_file(a.input)
    dg = _load_distributed(a.input, a.s, a.policy, a.seed)
    meter = meter_for(dg, Model.BLACKBOARD)
    tree = bfs_blackboard(dg, a.root, meter)
    _emit(io.format_edgelist(tree), a.out)
    _write_meter(meter, a.meter, "bfs", dg.base.m, a.seed)
    return EXIT_OK


def cmd_sparsify(a) -> int:
    _require_file(a.input)
    dg = _load_distributed(a.input, a.s, a.policy, a.seed)
    meter = meter_for(dg, a.model)
    state = sparsify_run(dg, a.eps, a.rho, a.model, meter, a.seed, t_scale=a.t_scale,
                         residence_update=a.residence_update)
    h = state.graph
    _emit(io.format_edgelist(h), a.out)
    if a.rprime:
        io.write_rprime(state.r_prime, a.rprime)
    if a.manifest:
        report = check_spectral_sparsifier(dg.base, h, a.eps) if a.measure else None
        manifest = {
            "eps": a.eps, "rho": a.rho, "t_scale": a.t_scale, "seed": a.seed,
            "model": meter.model.value, "residence_update": a.residence_update,
            "input_edges": dg.base.m, "output_edges": h.m,
            "eps_star": report.eps_star if report else None,
            "bits_total": meter.bits_total, "edge_messages": meter.edge_messages,
            "marker_messages": meter.marker_messages, "rounds": meter.rounds,
            "iterations": state.history,
        }
        Path(a.manifest).write_text(json.dumps(manifest, indent=2) + "\n")
    return EXIT_OK


def cmd_cluster(a) -> int:
    _require_file(a.input)
    truth = io.read_partition(a.truth, a.k) if a.truth else None
    if io.is_distributed(a.input) or a.s > 1:
        dg = _load_distributed(a.input, a.s, a.policy, a.seed)
        part, quality, meter = distributed_cluster(
            dg, a.k, a.eps, a.rho, a.model, seed=a.seed, truth=truth, t_scale=a.t_scale,
            residence_update=a.residence_update)
        _write_meter(meter, a.meter, "cluster", dg.base.m, a.seed)
    else:
        g = io.read_edgelist(a.input)
        part = spectral_clustering(g, a.k, a.seed)
        quality = match_and_score(part, truth, g) if truth is not None else None
    buf = _stdio.StringIO()
    for v, c in enumerate(part.assignment.tolist()):
        buf.write(f"{v} {c}\n")
    _emit(buf.getvalue(), a.out)
    if a.quality and quality is not None:
        Path(a.quality).write_text(quality.to_json() + "\n")
    return EXIT_OK


def cmd_verify(a) -> int:
    _require_file(a.g)
    _require_file(a.h)
    g, h = io.read_edgelist(a.g), io.read_edgelist(a.h)
    if a.check == "spectral":
        report = check_spectral_sparsifier(g, h, a.eps)
    elif a.check == "stretch":
        report = check_stretch(g, h, a.mult, a.add)
    else:
        report = check_conductance_preservation(g, h, a.sets, a.seed, exhaustive=a.exhaustive)
    _emit(report.to_json() + "\n", a.out)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- sweep ----------------------------------------------------------------------------
@dataclass(frozen=True)
class SweepCell:
    algorithm: str
    model: str
    n: int
    s: int
    seed: int
    m: int
    w_max: int
    policy: str
    k: float
    eps: float
    rho: float
    t_scale: float
    delta: float
    input: str | None = None


def run_cell(cell: SweepCell) -> dict:
    """One isolated run; returns its CSV row."""
    if cell.input:
        g = io.read_edgelist(cell.input)
    elif cell.w_max > 1:
        g = gen_weighted_random(cell.n, cell.m, cell.w_max, cell.seed)
    else:
        g = gen_unit_random(cell.n, cell.m, cell.seed)
    dg = distribute(g, cell.s, parse_policy(cell.policy), cell.seed)
    model = Model.BLACKBOARD if cell.algorithm in ("plus2", "bfs") else Model.parse(cell.model)
    meter = meter_for(dg, model)
    if cell.algorithm == "spanner":
        spanner_dup(dg, cell.k, model, meter)
    elif cell.algorithm == "plus2":
        plus2_spanner(dg, cell.delta, meter, cell.seed)
    elif cell.algorithm == "bfs":
        bfs_blackboard(dg, 0, meter)
    else:
        sparsify_run(dg, cell.eps, cell.rho, model, meter, cell.seed, t_scale=cell.t_scale)
    return meter.csv_row(cell.algorithm, g.m, cell.seed)


def sweep_cells(algorithm, models, ns, ss, seeds, *, m=None, m_per_n=4.0, w_max=1,
                policy="uniform:0.5", k=2.0, eps=0.5, rho=4.0, t_scale=1.0, delta=None,
                input=None) -> list[SweepCell]:
    if algorithm not in SWEEP_ALGORITHMS:
        raise UsageError(f"unknown sweep algorithm {algorithm!r}")
    cells = []
    for model in models:
        for n in ns:
            edges = m if m is not None else min(n * (n - 1) // 2, int(round(m_per_n * n)))
            for s in ss:
                for seed in seeds:
                    d = delta if delta is not None else 1.0 / max(n, 2)
                    cells.append(SweepCell(algorithm, model, n, s, seed, edges, w_max, policy,
                                           k, eps, rho, t_scale, d, input))
    return cells


def worker_count(cells: int) -> int:
    env = os.environ.get("DUPSPARSE_THREADS", "")
    cap = int(env) if env.strip() else (os.cpu_count() or 1)
    return max(1, min(cap, cells))


def run_sweep(cells: list[SweepCell]) -> list[dict]:
    """Rows in cell order regardless of which worker finishes first."""
    workers = worker_count(len(cells))
    if workers == 1:
        return [run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_cell, cells))


def format_csv(rows: list[dict]) -> str:
    buf = _stdio.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_sweep(a) -> int:
    if a.input:
        _require_file(a.input)
    cells = sweep_cells(a.alg, [Model.parse(x).value for x in a.models.split(",")],
                        _ints(a.n), _ints(a.s), _ints(a.seeds), m=a.m, m_per_n=a.m_per_n,
                        w_max=a.w_max, policy=a.policy, k=a.k, eps=a.eps, rho=a.rho,
                        t_scale=a.t_scale, delta=a.delta, input=a.input)
    _emit(format_csv(run_sweep(cells)), a.out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------
def _add_dist_opts(p) -> None:
    p.add_argument("--s", type=int, default=1, help="sites when the input is a plain edge list")
    p.add_argument("--policy", default="partition",
                   help="partition | uniform:R | overlap:D (plain edge-list input)")


def _add_sparsify_opts(p) -> None:
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=4.0)
    p.add_argument("--t-scale", type=float, default=1.0)
    p.add_argument("--model", default="bb")
    p.add_argument("--residence-update", choices=("conditional", "product"),
                   default="conditional")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="dupsparse", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["gen"] = sub.add_parser("gen", help="generate a graph")
    p.add_argument("kind", choices=("sbm", "random", "unit"))
    p.add_argument("params", nargs="*")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truth", help="write the planted partition here (sbm)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_gen)

    p = subs["distribute"] = sub.add_parser("distribute", help="assign edges to sites")
    p.add_argument("input")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--policy", default="partition")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_distribute)

    p = subs["spanner"] = sub.add_parser("spanner", help="spanner protocols")
    p.add_argument("input")
    p.add_argument("--alg", choices=("dup", "plus2", "bundle"), default="dup")
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--model", default="bb")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--t", type=int, default=1, help="levels for --alg bundle")
    p.add_argument("--mp-delta", action="store_true",
                   help="relay only new edges between sites (message passing)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--meter", help="write cost totals as JSON here")
    p.add_argument("-o", "--out")
    _add_dist_opts(p)
    p.set_defaults(func=cmd_spanner)

    p = subs["bfs"] = sub.add_parser("bfs", help="BFS tree on the blackboard")
    p.add_argument("input")
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--meter")
    p.add_argument("-o", "--out")
    _add_dist_opts(p)
    p.set_defaults(func=cmd_bfs)

    p = subs["sparsify"] = sub.add_parser("sparsify", help="spectral sparsifier")
    p.add_argument("input")
    _add_sparsify_opts(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", help="write run parameters, measured eps* and cost here")
    p.add_argument("--no-measure", dest="measure", action="store_false",
                   help="skip the dense eps* measurement in the manifest")
    p.add_argument("--rprime", help="write final residence probabilities here")
    p.add_argument("-o", "--out")
    _add_dist_opts(p)
    p.set_defaults(func=cmd_sparsify)

    p = subs["cluster"] = sub.add_parser("cluster", help="spectral clustering")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=2)
    _add_sparsify_opts(p)
    p.add_argument("--truth", help="planted partition for quality scoring")
    p.add_argument("--quality", help="write the quality report JSON here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--meter")
    p.add_argument("-o", "--out")
    _add_dist_opts(p)
    p.set_defaults(func=cmd_cluster)

    p = subs["verify"] = sub.add_parser("verify", help="dense checks; exit 0 pass, 1 fail")
    p.add_argument("check", choices=("spectral", "stretch", "conductance"))
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--mult", type=float, default=1.0)
    p.add_argument("--add", type=float, default=0.0)
    p.add_argument("--sets", type=int, default=1000)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_verify)

    p = subs["sweep"] = sub.add_parser("sweep", help="cost grid to CSV")
    p.add_argument("--alg", choices=SWEEP_ALGORITHMS, default="spanner")
    p.add_argument("--models", default="mp,bb")
    p.add_argument("--n", default="64", help="comma list of vertex counts")
    p.add_argument("--s", default="2,4,8", help="comma list of site counts")
    p.add_argument("--seeds", default="0", help="comma list or ranges, e.g. 0-9")
    p.add_argument("--m", type=int, help="fixed edge count (default m_per_n * n)")
    p.add_argument("--m-per-n", type=float, default=4.0)
    p.add_argument("--w-max", type=int, default=1)
    p.add_argument("--policy", default="uniform:0.5")
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=4.0)
    p.add_argument("--t-scale", type=float, default=1.0)
    p.add_argument("--delta", type=float)
    p.add_argument("--input", help="edge-list file used instead of the generator")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_sweep)
    return parser, subs


def _apply_config(parser, subs, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    command = next((tok for tok in rest if tok in subs), None)
    if command is None:
        return
    sub = subs[command]
    dests = {a.dest for a in sub._actions}
    values = {}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            raise UsageError(f"config key {key!r} is not an option of {command}")
        values[dest] = value
    sub.set_defaults(**values)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config(parser, subs, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK
    except (UsageError, DupSparseError, ValueError, OSError) as exc:
        print(f"dupsparse: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
