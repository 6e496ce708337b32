"""Message-passing and blackboard communication over a distributed graph.

A :class:`DistributedGraph` is one base graph whose edges are held by ``s``
sites, possibly with copies at several sites. A :class:`CostMeter` records
the bits a simulated protocol sends. Every edge message costs
``edge_bits(n, w_max)`` bits (two endpoints plus a weight); a completion
marker costs one bit. In the message-passing model a site-to-site transfer
goes through the coordinator and is charged twice.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelMismatch
from .graph import Edge, Graph, canon
from .rng import generator


class Model(enum.Enum):
    MESSAGE_PASSING = "mp"
    BLACKBOARD = "bb"

    @classmethod
    def parse(cls, value) -> Model:
        if isinstance(value, Model):
            return value
        text = str(value).lower()
        aliases = {"mp": cls.MESSAGE_PASSING, "message_passing": cls.MESSAGE_PASSING,
                   "messagepassing": cls.MESSAGE_PASSING,
                   "bb": cls.BLACKBOARD, "blackboard": cls.BLACKBOARD}
        try:
            return aliases[text]
        except KeyError:
            raise ValueError(f"unknown communication model {value!r}") from None


class Charge(enum.Enum):
    EDGE_TO_COORDINATOR = "edge_to_coordinator"
    EDGE_RELAYED = "edge_relayed"
    EDGE_TO_BLACKBOARD = "edge_to_blackboard"
    MARKER = "marker"


def edge_bits(n: int, w_max: float) -> int:
    """Bits for one weighted edge: 2*ceil(log2 n) + ceil(log2(w_max + 1))."""
    if n < 2:
        raise ValueError("edge_bits needs n >= 2")
    w = int(math.ceil(w_max))
    return 2 * (n - 1).bit_length() + w.bit_length()


CSV_COLUMNS = ["model", "algorithm", "n", "m", "s", "seed",
               "bits_total", "edge_messages", "marker_messages", "rounds"]


@dataclass
class CostMeter:
    """Bit- and message-exact transcript totals for one protocol run."""

    model: Model
    n: int
    s: int
    w_max: float = 1.0
    bits_total: int = 0
    edge_messages: int = 0
    marker_messages: int = 0
    rounds: int = 0
    per_site_bits: list = field(default_factory=list)

    def __post_init__(self):
        self.model = Model.parse(self.model)
        if not self.per_site_bits:
            self.per_site_bits = [0] * max(self.s, 1)

    @property
    def edge_cost(self) -> int:
        return edge_bits(max(self.n, 2), self.w_max)

    def charge(self, kind: Charge, count: int = 1, site: int = 0) -> CostMeter:
        if count < 0:
            raise ValueError("charge count must be non-negative")
        if count == 0:
            return self
        if kind is Charge.EDGE_RELAYED and self.model is not Model.MESSAGE_PASSING:
            raise ModelMismatch("relayed transfers exist only in the message-passing model")
        if kind is Charge.EDGE_TO_BLACKBOARD and self.model is not Model.BLACKBOARD:
            raise ModelMismatch("blackboard writes exist only in the blackboard model")
        if kind is Charge.MARKER:
            bits = count
            self.marker_messages += count
        else:
            hops = 2 if kind is Charge.EDGE_RELAYED else 1
            bits = hops * self.edge_cost * count
            self.edge_messages += count
        self.bits_total += bits
        self.per_site_bits[site] += bits
        return self

    def raise_w_max(self, w: float) -> None:
        self.w_max = max(self.w_max, float(w))

    def csv_row(self, algorithm: str, m: int, seed: int) -> dict:
        return {"model": self.model.value, "algorithm": algorithm, "n": self.n, "m": m,
                "s": self.s, "seed": seed, "bits_total": self.bits_total,
                "edge_messages": self.edge_messages, "marker_messages": self.marker_messages,
                "rounds": self.rounds}


def meter_for(dg: DistributedGraph, model) -> CostMeter:
    return CostMeter(Model.parse(model), dg.base.n, dg.s, w_max=dg.base.w_max)


# -- distribution policies ------------------------------------------------------
@dataclass(frozen=True)
class PartitionPolicy:
    """Disjoint near-equal split (non-duplication model)."""

    def __str__(self):
        return "partition"


@dataclass(frozen=True)
class UniformIID:
    """Each edge lands at each site independently with probability ``r``."""

    r: float

    def __str__(self):
        return f"uniform:{self.r:g}"


@dataclass(frozen=True)
class AdversarialOverlap:
    """Each edge is copied to exactly ``d`` sites."""

    d: int

    def __str__(self):
        return f"overlap:{self.d}"


def parse_policy(text: str):
    """Parse ``partition``, ``uniform:R`` or ``overlap:D``."""
    name, _, arg = str(text).partition(":")
    name = name.lower()
    if name == "partition":
        return PartitionPolicy()
    if name in ("uniform", "uniformiid"):
        return UniformIID(float(arg))
    if name in ("overlap", "adversarialoverlap"):
        return AdversarialOverlap(int(arg))
    raise ValueError(f"unknown distribution policy {text!r}")


@dataclass
class DistributedGraph:
    """Per-site edge views of one graph plus per-edge residence probability."""

    base: Graph
    s: int
    site_edges: list
    residence_prob: dict
    duplication: bool = True

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("need at least one site")
        if len(self.site_edges) != self.s:
            raise ValueError("site_edges must have one list per site")
        self.site_edges = [sorted({canon(*e) for e in lst}) for lst in self.site_edges]
        held = set()
        for lst in self.site_edges:
            for e in lst:
                if e not in self.base:
                    raise ValueError(f"site edge {e} missing from the base graph")
            if not self.duplication and held.intersection(lst):
                raise ValueError("site edge sets overlap in non-duplication mode")
            held.update(lst)
        keys = self.base.edge_keys()
        if len(held) != len(keys):
            raise ValueError("some base edges are held by no site")
        self.residence_prob = {canon(*e): float(r) for e, r in self.residence_prob.items()}
        for e in keys:
            r = self.residence_prob.get(e)
            if r is None or not 0.0 < r <= 1.0:
                raise ValueError(f"edge {e} needs a residence probability in (0, 1]")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def sampling_sites(self) -> int:
        """Site count used by the uniform-sampling solver (1 without duplication)."""
        return self.s if self.duplication else 1

    def sites_of(self) -> dict[Edge, list[int]]:
        out: dict[Edge, list[int]] = {}
        for i, lst in enumerate(self.site_edges):
            for e in lst:
                out.setdefault(e, []).append(i)
        return out

    def site_graph(self, i: int) -> Graph:
        return self.base.subgraph(self.site_edges[i])

    def copies(self) -> int:
        return sum(len(lst) for lst in self.site_edges)

    def without(self, keys) -> DistributedGraph:
        """Remove ``keys`` from the base graph and from every site."""
        drop = {canon(*e) for e in keys}
        return DistributedGraph(
            self.base.without(drop), self.s,
            [[e for e in lst if e not in drop] for lst in self.site_edges],
            {e: r for e, r in self.residence_prob.items() if e not in drop},
            self.duplication,
        )


def distribute(g: Graph, s: int, policy, seed: int) -> DistributedGraph:
    """Place the edges of ``g`` at ``s`` sites according to ``policy``."""
    if s < 1:
        raise ValueError("need at least one site")
    if isinstance(policy, str):
        policy = parse_policy(policy)
    keys = g.edge_keys()
    sites: list[list[Edge]] = [[] for _ in range(s)]
    if isinstance(policy, PartitionPolicy):
        rng = generator(seed, "distribute", "partition")
        order = rng.permutation(len(keys))
        for pos, idx in enumerate(order.tolist()):
            sites[pos % s].append(keys[idx])
        return DistributedGraph(g, s, sites, dict.fromkeys(keys, 1.0), duplication=False)
    if isinstance(policy, UniformIID):
        r = float(policy.r)
        if not 0.0 < r <= 1.0:
            raise ValueError("residence probability must lie in (0, 1]")
        rng = generator(seed, "distribute", "uniform")
        for e in keys:
            while True:
                present = np.flatnonzero(rng.random(s) < r)
                if present.size:
                    break
            for i in present.tolist():
                sites[i].append(e)
        return DistributedGraph(g, s, sites, dict.fromkeys(keys, r), duplication=True)
    if isinstance(policy, AdversarialOverlap):
        d = int(policy.d)
        if not 1 <= d <= s:
            raise ValueError("overlap must satisfy 1 <= d <= s")
        rng = generator(seed, "distribute", "overlap")
        for e in keys:
            for i in rng.choice(s, size=d, replace=False).tolist():
                sites[i].append(e)
        return DistributedGraph(g, s, sites, dict.fromkeys(keys, d / s), duplication=True)
    raise TypeError(f"unsupported policy {policy!r}")
