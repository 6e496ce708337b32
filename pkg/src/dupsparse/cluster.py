"""Spectral clustering at the coordinator and the distributed pipeline."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .comm import CostMeter, DistributedGraph, Model, meter_for
from .errors import ShapeMismatch
from .graph import Graph, Partition, conductance, normalized_laplacian
from .rng import generator
from .sparsifier import spectral_sparsify

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100
EXHAUSTIVE_MATCH_K = 8


def kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        idx = rng.integers(n) if total <= 0 else rng.choice(n, p=d2 / total)
        centers[j] = x[idx]
        d2 = np.minimum(d2, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int = KMEANS_MAX_ITER):
    """Lloyd iterations; returns (labels, centers, objective trace).

    An emptied cluster keeps its previous centre, so the objective never
    increases.
    """
    centers = centers.copy()
    labels = None
    trace = []
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = d2.argmin(axis=1)
        trace.append(float(d2[np.arange(x.shape[0]), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(centers.shape[0]):
            members = x[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    trace.append(float(d2[np.arange(x.shape[0]), labels].sum()))
    return labels, centers, trace


def kmeans(x: np.ndarray, k: int, seed: int, restarts: int = KMEANS_RESTARTS,
           max_iter: int = KMEANS_MAX_ITER):
    """Best of ``restarts`` k-means++ seeded Lloyd runs by objective."""
    best = None
    for r in range(restarts):
        rng = generator(seed, "kmeans", r)
        labels, _, trace = lloyd(x, kmeans_pp_init(x, k, rng), max_iter)
        if best is None or trace[-1] < best[1]:
            best = (labels, trace[-1])
    return best[0], best[1]


def spectral_embedding(g: Graph, k: int) -> np.ndarray:
    """Bottom-k eigenvectors of the normalized Laplacian, rows scaled to unit length."""
    _, vecs = np.linalg.eigh(normalized_laplacian(g))
    u = vecs[:, :k].copy()
    norms = np.linalg.norm(u, axis=1)
    nz = norms > 1e-12
    u[nz] /= norms[nz, None]
    u[~nz] = 0.0
    return u


def spectral_clustering(g: Graph, k: int, seed: int = 0) -> Partition:
    if not 1 <= k <= max(g.n, 1):
        raise ValueError("need 1 <= k <= n")
    if k == 1:
        return Partition(np.zeros(g.n, dtype=np.int64), 1)
    labels, _ = kmeans(spectral_embedding(g, k), k, seed)
    return Partition(labels, k).canonical()


@dataclass
class ClusterQuality:
    max_conductance: float  # upper estimate of the k-way expansion constant
    lambda_k1: float
    upsilon: float
    sym_diff_vols: list
    misclassified_vol_frac: float
    matching: list  # found cluster matched to each truth cluster

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return str(v)
            return v
        return json.dumps({k: clean(v) for k, v in self.to_dict().items()}, indent=2)


def _best_matching(cost: np.ndarray) -> list[int]:
    k = cost.shape[0]
    if k <= EXHAUSTIVE_MATCH_K:
        cols = np.arange(k)
        best, best_cost = None, math.inf
        for perm in itertools.permutations(range(k)):
            c = cost[list(perm), cols].sum()
            if c < best_cost - 1e-12:
                best, best_cost = perm, c
        return list(best)
    rows, cols = linear_sum_assignment(cost)
    out = [0] * k
    for r, c in zip(rows, cols):
        out[c] = int(r)
    return out


def match_and_score(found: Partition, truth: Partition, g: Graph) -> ClusterQuality:
    if found.n != truth.n or found.n != g.n:
        raise ShapeMismatch("partitions and graph disagree on vertex count")
    if found.k != truth.k:
        raise ShapeMismatch(f"cluster counts differ: {found.k} vs {truth.k}")
    k = truth.k
    deg = g.degrees()
    overlap = np.zeros((k, k))
    np.add.at(overlap, (found.assignment, truth.assignment), deg)
    vol_found = overlap.sum(axis=1)
    vol_truth = overlap.sum(axis=0)
    cost = vol_found[:, None] + vol_truth[None, :] - 2.0 * overlap
    match = _best_matching(cost)
    sym = [float(cost[match[j], j]) for j in range(k)]
    total = float(vol_truth.sum())
    frac = sum(sym) / total if total > 0 else 0.0

    conds = [conductance(g, found.assignment == c) for c in range(k) if vol_found[c] > 0]
    max_cond = max(conds, default=0.0)
    if k < g.n:
        lam = float(np.linalg.eigvalsh(normalized_laplacian(g))[k])
    else:
        lam = math.nan
    ups = lam / max_cond if max_cond > 0 else math.inf
    return ClusterQuality(max_cond, lam, ups, sym, frac, match)


def distributed_cluster(dg: DistributedGraph, k: int, eps: float, rho: float, model,
                        meter: CostMeter | None = None, seed: int = 0, *,
                        truth: Partition | None = None, t_scale: float = 1.0,
                        residence_update: str = "conditional"):
    """Sparsify at the coordinator, then cluster the sparsifier locally.

    Returns ``(partition, quality or None, meter)``; the meter only covers
    sparsification since clustering needs no communication.
    """
    model = Model.parse(model)
    if meter is None:
        meter = meter_for(dg, model)
    h = spectral_sparsify(dg, eps, rho, model, meter, seed, t_scale=t_scale,
                          residence_update=residence_update)
    part = spectral_clustering(h, k, seed)
    quality = match_and_score(part, truth, dg.base) if truth is not None else None
    return part, quality, meter
