"""Distributed spanner constructions over a :class:`DistributedGraph`.

Sites are processed in ascending index order and, within a site, edges in
ascending canonical order. The output graphs do not depend on the
communication model; only the meter does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .comm import Charge, CostMeter, DistributedGraph, Model, meter_for
from .graph import Edge, Graph, canon
from .rng import generator


def cycle_hops(k: float) -> int:
    """Hop limit of the insertion test: reject when a path of <= ceil(2k)-1 hops exists."""
    return int(math.ceil(2.0 * k - 1e-12)) - 1


def weight_bucket(w: float) -> int:
    """Index i with w in [2^(i-1), 2^i)."""
    if w < 1.0:
        raise ValueError(f"spanner weights must be >= 1, got {w}")
    return math.frexp(w)[1]


def spanner_dup(dg: DistributedGraph, k: float, model, meter: CostMeter | None = None,
                *, mp_delta: bool = False) -> Graph:
    """Greedy bucketed spanner under edge duplication.

    Weighted inputs are processed one weight scale ``[2^(i-1), 2^i)`` at a
    time for ``i = 1..ceil(log2(n * w_max))``; an edge is dropped when the
    current spanner already joins its endpoints within ``ceil(2k) - 1`` hops.
    The result has girth > ceil(2k) and stretch 2*(ceil(2k) - 1) (at most
    4k - 2 for integer k). Unit-weight inputs occupy a single scale and are
    handled in one pass, which gives stretch ceil(2k) - 1.

    Message passing: each site forwards the whole current spanner to the next
    site (relayed through the coordinator); the final holder sends it to the
    coordinator. ``mp_delta`` forwards only edges the receiver has not seen.
    Blackboard: each site posts the edges it added, then a one-bit
    end-of-turn marker.
    """
    if k <= 1:
        raise ValueError("stretch parameter k must exceed 1")
    return _spanner(dg, k, model, meter, mp_delta)


def _phases(dg: DistributedGraph) -> list[list[list[Edge]]]:
    base = dg.base
    if base.is_unit():
        return [dg.site_edges]
    buckets = {e: weight_bucket(w) for e, w in base.weights().items()}
    top = max(buckets.values(), default=1)
    count = max(1, math.ceil(math.log2(max(base.n, 1) * base.w_max)), top)
    out = []
    for i in range(1, count + 1):
        out.append([[e for e in lst if buckets[e] == i] for lst in dg.site_edges])
    return out


def _spanner(dg, k, model, meter, mp_delta=False) -> Graph:
    model = Model.parse(model)
    if meter is None:
        meter = meter_for(dg, model)
    meter.raise_w_max(dg.base.w_max)
    phases = _phases(dg)
    order: list[Edge] = []
    groups = []  # (site, start, stop) per turn, in processing order
    for phase in phases:
        for site, lst in enumerate(phase):
            groups.append((site, len(order), len(order) + len(lst)))
            order.extend(lst)
    if order:
        arr = np.asarray(order, dtype=np.int64)
        mask = kernels.greedy_spanner(dg.n, arr[:, 0], arr[:, 1], cycle_hops(k))
    else:
        mask = np.zeros(0, dtype=np.uint8)
    added_per_turn = [int(mask[a:b].sum()) for _, a, b in groups]

    s = dg.s
    h_size = 0
    seen_by = [0] * s  # spanner size each site last held (delta mode)
    turn = 0
    for _ in phases:
        meter.rounds += 1
        for site in range(s):
            added = added_per_turn[turn]
            h_size += added
            last = turn == len(groups) - 1
            if model is Model.BLACKBOARD:
                meter.charge(Charge.EDGE_TO_BLACKBOARD, added, site)
                meter.charge(Charge.MARKER, 1, site)
            elif last:
                meter.charge(Charge.EDGE_TO_COORDINATOR, h_size, site)
            elif s > 1:
                nxt = (site + 1) % s
                sent = h_size - seen_by[nxt] if mp_delta else h_size
                meter.charge(Charge.EDGE_RELAYED, sent, site)
                seen_by[nxt] = h_size
            seen_by[site] = h_size
            turn += 1
    kept = [e for e, keep in zip(order, mask.tolist()) if keep]
    return dg.base.subgraph(kept)


# -- BFS on the blackboard -----------------------------------------------------
def _site_adjacency(dg: DistributedGraph) -> list[dict[int, list[int]]]:
    out = []
    for lst in dg.site_edges:
        adj: dict[int, list[int]] = {}
        for u, v in lst:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
        for nb in adj.values():
            nb.sort()
        out.append(adj)
    return out


def bfs_blackboard(dg: DistributedGraph, root: int, meter: CostMeter | None = None,
                   *, _adjacency=None) -> Graph:
    """Grow a BFS tree from ``root`` on the blackboard.

    Each round, sites in order post edges from the active frontier to
    vertices not yet linked to the tree (a vertex already linked by an
    earlier post is skipped, so each tree edge is written exactly once).
    A site that posts nothing writes a one-bit marker.
    """
    n = dg.n
    if not 0 <= root < n:
        raise ValueError(f"root {root} outside vertex range")
    if meter is None:
        meter = meter_for(dg, Model.BLACKBOARD)
    if meter.model is not Model.BLACKBOARD:
        raise ValueError("bfs_blackboard needs a blackboard meter")
    meter.raise_w_max(dg.base.w_max)
    adj = _adjacency if _adjacency is not None else _site_adjacency(dg)
    reached = {root}
    active = [root]
    tree: list[Edge] = []
    while active:
        meter.rounds += 1
        frontier = []
        for site in range(dg.s):
            local = adj[site]
            sent = 0
            for v in active:
                for w in local.get(v, ()):
                    if w not in reached:
                        reached.add(w)
                        tree.append(canon(v, w))
                        frontier.append(w)
                        sent += 1
            if sent:
                meter.charge(Charge.EDGE_TO_BLACKBOARD, sent, site)
            else:
                meter.charge(Charge.MARKER, 1, site)
        active = sorted(frontier)
    return dg.base.subgraph(tree)


# -- +2 spanner ----------------------------------------------------------------
@dataclass
class Plus2Result:
    spanner: Graph
    phase1: set = field(default_factory=set)
    # (site, vertex, union degree seen at decision time, edges posted)
    shipments: list = field(default_factory=list)
    roots: list = field(default_factory=list)
    threshold: float = 0.0


def plus2_sample_size(n: int, s: int, delta: float) -> int:
    if n <= 1:
        return n
    return int(math.ceil(n / math.sqrt(n + s) * math.log(n / delta)))


def plus2_spanner(dg: DistributedGraph, delta: float, meter: CostMeter | None = None,
                  seed: int = 0) -> Graph:
    """+2 spanner on the blackboard (unit weights)."""
    return plus2_spanner_run(dg, delta, meter, seed).spanner


def plus2_spanner_run(dg: DistributedGraph, delta: float, meter: CostMeter | None = None,
                      seed: int = 0) -> Plus2Result:
    """+2 spanner with its phase-1 transcript.

    Phase 1: each site in turn posts the local edges of every vertex ``u``
    whose edge count over (blackboard edges of u) union (local edges of u)
    is at most sqrt(n + s), skipping edges already on the blackboard; each
    turn ends with a one-bit marker. Phase 2: the coordinator samples
    ``ceil(n / sqrt(n + s) * ln(n / delta))`` roots with replacement and
    grows a blackboard BFS tree from each distinct root.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not dg.base.is_unit():
        raise ValueError("the +2 spanner is defined for unit-weight graphs")
    n, s = dg.n, dg.s
    if meter is None:
        meter = meter_for(dg, Model.BLACKBOARD)
    if meter.model is not Model.BLACKBOARD:
        raise ValueError("plus2_spanner runs in the blackboard model")
    meter.raise_w_max(dg.base.w_max)
    tau = math.sqrt(n + s)
    board: set[Edge] = set()
    board_deg = [0] * n
    result = Plus2Result(spanner=Graph(n), threshold=tau)
    adj = _site_adjacency(dg)

    meter.rounds += 1
    for site in range(s):
        local = adj[site]
        sent = 0
        for u in sorted(local):
            fresh = [canon(u, v) for v in local[u] if canon(u, v) not in board]
            if board_deg[u] + len(fresh) > tau:
                continue
            for e in fresh:
                board.add(e)
                board_deg[e[0]] += 1
                board_deg[e[1]] += 1
            result.shipments.append((site, u, board_deg[u], fresh))
            sent += len(fresh)
        meter.charge(Charge.EDGE_TO_BLACKBOARD, sent, site)
        meter.charge(Charge.MARKER, 1, site)
    result.phase1 = set(board)

    edges = set(board)
    if n:
        rng = generator(seed, "plus2", "roots")
        sample = rng.integers(0, n, size=plus2_sample_size(n, s, delta)).tolist()
        roots = list(dict.fromkeys(sample))
        result.roots = roots
        for r in roots:
            tree = bfs_blackboard(dg, r, meter, _adjacency=adj)
            edges.update(tree.edge_keys())
    result.spanner = dg.base.subgraph(edges)
    return result


# -- t-bundle spanners -----------------------------------------------------------
@dataclass
class BundleSpanner:
    levels: list
    union: Graph

    @property
    def t(self) -> int:
        return len(self.levels)


def t_bundle(dg: DistributedGraph, t: int, k: float, model,
             meter: CostMeter | None = None) -> tuple[BundleSpanner, DistributedGraph]:
    """Peel ``t`` successive spanners off the residual graph.

    Level i is a spanner of the graph left after removing levels 1..i-1 from
    every site. Once a level comes back empty the residual is known to be
    empty and the remaining levels are empty without further communication.
    """
    if t < 1:
        raise ValueError("bundle size t must be at least 1")
    if k <= 1:
        raise ValueError("stretch parameter k must exceed 1")
    return _bundle(dg, t, k, model, meter)


def _bundle(dg, t, k, model, meter):
    model = Model.parse(model)
    if meter is None:
        meter = meter_for(dg, model)
    levels: list[Graph] = []
    residual = dg
    union: set[Edge] = set()
    for _ in range(t):
        if levels and levels[-1].m == 0:
            levels.append(Graph(dg.n))
            continue
        level = _spanner(residual, k, model, meter)
        levels.append(level)
        if level.m:
            union.update(level.edge_keys())
            residual = residual.without(level.edge_keys())
    return BundleSpanner(levels, dg.base.subgraph(union)), residual


# -- vertex splitting ------------------------------------------------------------
@dataclass(frozen=True)
class SplitMapping:
    """Vertex v owns clones ``v*factor .. v*factor + factor - 1``."""

    n: int
    factor: int

    def forward(self, v: int) -> list[int]:
        return list(range(v * self.factor, (v + 1) * self.factor))

    def backward(self, x: int) -> int:
        return x // self.factor


def split_duplication(dg: DistributedGraph) -> tuple[DistributedGraph, SplitMapping]:
    """Turn duplicated copies into distinct edges between vertex clones.

    Each vertex gets ``ceil(sqrt(s))`` clones. The q-th copy of (u, v), counting
    holding sites in ascending order, becomes the clone edge
    ``(u_{q // c}, v_{q % c})`` at that site only.
    """
    c = math.isqrt(dg.s - 1) + 1 if dg.s > 1 else 1
    mapping = SplitMapping(dg.n, c)
    edges: dict[Edge, float] = {}
    sites: list[list[Edge]] = [[] for _ in range(dg.s)]
    for (u, v), holders in sorted(dg.sites_of().items()):
        w = dg.base.weight(u, v)
        for q, site in enumerate(holders):
            e = (u * c + q // c, v * c + q % c)
            edges[e] = w
            sites[site].append(e)
    split = Graph(dg.n * c, edges, weight_exponent=None)
    out = DistributedGraph(split, dg.s, sites, dict.fromkeys(edges, 1.0), duplication=False)
    return out, mapping


def project_spanner(h_split: Graph, mapping: SplitMapping, base: Graph) -> Graph:
    """Keep (u, v) when some clone of u is joined to some clone of v."""
    keys = set()
    for x, y in h_split.edge_keys():
        u, v = mapping.backward(x), mapping.backward(y)
        if u != v:
            keys.add(canon(u, v))
    return base.subgraph(keys)
