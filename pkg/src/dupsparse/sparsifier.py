"""Spectral sparsification under edge duplication.

One light pass peels a t-bundle of log n-spanners off the distributed graph
and samples every remaining edge copy at its site with probability ``p_e``
chosen so that the edge survives at one or more sites with probability 1/4.
Survivors are re-weighted by 4. Sampled edges stay at their sites between
passes and are only sent to the coordinator after the last pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .comm import Charge, CostMeter, DistributedGraph, Model, meter_for
from .errors import Infeasible
from .graph import Edge, Graph
from .rng import keyed_uniform
from .spanner import BundleSpanner, _bundle

SAMPLE_RATE = 0.25
REWEIGHT = 1.0 / SAMPLE_RATE
BUNDLE_CONSTANT = 24.0

# How a sampled edge's residence probability is carried to the next pass.
# "conditional": probability a given site holds the copy given that the edge
#   survived, p_e * r_e / SAMPLE_RATE. Keeps the next pass at rate ~1/4.
# "product": p_e * r_e. Forces p_e = 1 on every later pass.
RESIDENCE_UPDATES = ("conditional", "product")


def solve_site_prob(r_e: float, s: int, target: float = SAMPLE_RATE) -> float:
    """Per-site probability p_e with 1 - (1 - p_e * r_e)^s = target."""
    if not 0.0 < r_e <= 1.0:
        raise ValueError("residence probability must lie in (0, 1]")
    if not 0.0 < target < 1.0:
        raise ValueError("target must lie in (0, 1)")
    if s < 1:
        raise ValueError("need at least one site")
    # 1 - (1 - target)^(1/s), computed without cancellation
    per_site = -math.expm1(math.log1p(-target) / s)
    p = per_site / r_e
    if p > 1.0:
        if p > 1.0 + 1e-12:
            raise Infeasible(f"r_e={r_e:g} is too small to reach {target:g} over {s} sites "
                             f"(needs p_e={p:.6g})")
        p = 1.0
    return p


def bundle_size(n: int, eps: float, t_scale: float = 1.0) -> int:
    """Bundle levels: ceil(t_scale * 24 * log2(n)^2 / eps^2), at least 1."""
    logn = math.log2(n) if n > 1 else 0.0
    return max(1, math.ceil(t_scale * BUNDLE_CONSTANT * logn * logn / (eps * eps)))


def spanner_stretch_param(n: int) -> float:
    return (2.0 + (math.log2(n) if n > 1 else 0.0)) / 4.0


@dataclass
class SparsifierState:
    dg: DistributedGraph
    r_prime: dict
    at_coordinator: bool = False
    iterations: int = 0
    history: list = field(default_factory=list)

    @classmethod
    def start(cls, dg: DistributedGraph) -> SparsifierState:
        return cls(dg, dict(dg.residence_prob))

    @property
    def graph(self) -> Graph:
        return self.dg.base


def light_ss(state: SparsifierState, eps: float, model, meter: CostMeter | None = None,
             seed: int = 0, is_last: bool = False, *, t_scale: float = 1.0,
             residence_update: str = "conditional") -> SparsifierState:
    """One light sparsification pass."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if residence_update not in RESIDENCE_UPDATES:
        raise ValueError(f"residence_update must be one of {RESIDENCE_UPDATES}")
    model = Model.parse(model)
    dg = state.dg
    if meter is None:
        meter = meter_for(dg, model)
    n = dg.n
    iteration = state.iterations
    t = bundle_size(n, eps, t_scale)
    bits_before = meter.bits_total
    bundle, residual = _bundle(dg, t, spanner_stretch_param(n), model, meter)
    bundle_bits = meter.bits_total - bits_before

    s_eff = dg.sampling_sites
    p = {e: solve_site_prob(state.r_prime[e], s_eff) for e in residual.base.edge_keys()}
    sampled_at: dict[Edge, list[int]] = {}
    for site, lst in enumerate(residual.site_edges):
        for e in lst:
            if keyed_uniform(seed, "sample", iteration, site, e[0], e[1]) < p[e]:
                sampled_at.setdefault(e, []).append(site)

    weights = bundle.union.weights()
    r_next = {e: state.r_prime[e] for e in weights}
    for e in sampled_at:
        weights[e] = REWEIGHT * dg.base.weight(*e)
        pr = p[e] * state.r_prime[e]
        r_next[e] = min(1.0, pr / SAMPLE_RATE) if residence_update == "conditional" else pr
    in_bundle = set(bundle.union.edge_keys())
    sites = []
    for site, lst in enumerate(dg.site_edges):
        held = [e for e in lst if e in in_bundle]
        held.extend(e for e, where in sampled_at.items() if site in where)
        sites.append(held)
    new_graph = Graph(n, weights, weight_exponent=None)
    new_dg = DistributedGraph(new_graph, dg.s, sites, r_next, dg.duplication)

    sample_bits = 0
    if is_last and residual.base.m:
        meter.raise_w_max(new_graph.w_max)
        before = meter.bits_total
        _send_samples(sampled_at, dg.s, model, meter)
        sample_bits = meter.bits_total - before

    state.history.append({
        "iteration": iteration, "t": t, "bundle_edges": bundle.union.m,
        "residual_edges": residual.base.m, "sampled_edges": len(sampled_at),
        "bundle_bits": bundle_bits, "sample_bits": sample_bits, "is_last": is_last,
    })
    return SparsifierState(new_dg, r_next, at_coordinator=is_last,
                           iterations=iteration + 1, history=state.history)


def _send_samples(sampled_at, s, model, meter):
    per_site: list[list[Edge]] = [[] for _ in range(s)]
    for e, where in sampled_at.items():
        for site in where:
            per_site[site].append(e)
    posted: set[Edge] = set()
    for site in range(s):
        if model is Model.BLACKBOARD:
            fresh = [e for e in per_site[site] if e not in posted]
            posted.update(fresh)
            meter.charge(Charge.EDGE_TO_BLACKBOARD, len(fresh), site)
            meter.charge(Charge.MARKER, 1, site)
        else:
            meter.charge(Charge.EDGE_TO_COORDINATOR, len(per_site[site]), site)


def sparsify_iterations(rho: float) -> int:
    if rho <= 1:
        raise ValueError("sparsify_rho must exceed 1")
    return max(1, math.ceil(math.log2(rho) - 1e-12))


def sparsify_run(dg: DistributedGraph, eps: float, rho: float, model,
                 meter: CostMeter | None = None, seed: int = 0, *, t_scale: float = 1.0,
                 residence_update: str = "conditional") -> SparsifierState:
    """Run ceil(log2 rho) light passes at eps / ceil(log2 rho) each."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    rounds = sparsify_iterations(rho)
    model = Model.parse(model)
    if meter is None:
        meter = meter_for(dg, model)
    state = SparsifierState.start(dg)
    for i in range(rounds):
        state = light_ss(state, eps / rounds, model, meter, seed, is_last=i == rounds - 1,
                         t_scale=t_scale, residence_update=residence_update)
    return state


def spectral_sparsify(dg: DistributedGraph, eps: float, rho: float, model,
                      meter: CostMeter | None = None, seed: int = 0, *, t_scale: float = 1.0,
                      residence_update: str = "conditional") -> Graph:
    """The coordinator's sparsifier: last bundle plus last sampled edges."""
    return sparsify_run(dg, eps, rho, model, meter, seed, t_scale=t_scale,
                        residence_update=residence_update).graph


__all__ = ["BundleSpanner", "SparsifierState", "solve_site_prob", "bundle_size",
           "light_ss", "sparsify_run", "spectral_sparsify", "sparsify_iterations"]
