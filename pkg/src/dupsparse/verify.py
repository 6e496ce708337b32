"""Dense oracles for sparsifier, spanner, resistance and conductance guarantees.

These checks deliberately avoid the code paths they verify: distances come
from scipy's Dijkstra rather than the hop-bounded BFS kernels, and spectral
quantities from full eigendecompositions.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .errors import ComponentMismatch, NotAPath
from .graph import Graph, canon, components, laplacian, laplacian_pinv
from .rng import generator

ZERO_RTOL = 1e-9
CHECK_ATOL = 1e-9


class _Report:
    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return str(v)
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v
        return json.dumps({k: clean(v) for k, v in self.to_dict().items()}, indent=2)


@dataclass
class SpectralReport(_Report):
    eps_star: float
    lambda_min: float
    lambda_max: float
    passed: bool
    eps: float


@dataclass
class StretchReport(_Report):
    max_violation: float
    worst_pair: tuple | None
    passed: bool
    mult: float
    add: float


@dataclass
class ResistanceReport(_Report):
    max_ratio: float  # max over non-bundle edges of R_G(e) / bound(e)
    max_ratio_bundle: float  # same with resistance measured in the bundle alone
    checked_edges: int
    violations: int
    passed: bool


@dataclass
class ConductanceReport(_Report):
    sets_checked: int
    sets_skipped: int
    violations: int
    min_ratio: float
    max_ratio: float
    passed: bool
    worst_sets: list = field(default_factory=list)


def _check_subgraph(g: Graph, h: Graph) -> None:
    if g.n != h.n:
        raise ValueError("graphs have different vertex counts")
    missing = [e for e in h.edge_keys() if e not in g]
    if missing:
        raise ValueError(f"h has edges absent from g, e.g. {missing[0]}")


def same_components(g: Graph, h: Graph) -> bool:
    a, b = components(g), components(h)
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


def check_spectral_sparsifier(g: Graph, h: Graph, eps: float) -> SpectralReport:
    """Extreme generalized eigenvalues of (L_h, L_g) off the shared nullspace."""
    _check_subgraph(g, h)
    if not same_components(g, h):
        raise ComponentMismatch("h does not have the connected components of g")
    vals, vecs = np.linalg.eigh(laplacian(g))
    if g.n == 0 or vals[-1] <= 0:
        return SpectralReport(0.0, 1.0, 1.0, True, eps)
    keep = vals > ZERO_RTOL * vals[-1]
    basis = vecs[:, keep] / np.sqrt(vals[keep])
    pencil = basis.T @ laplacian(h) @ basis
    ev = np.linalg.eigvalsh((pencil + pencil.T) / 2)
    lo, hi = float(ev[0]), float(ev[-1])
    eps_star = max(1.0 - lo, hi - 1.0, 0.0)
    return SpectralReport(eps_star, lo, hi, eps_star <= eps + 1e-12, eps)


def apsp(g: Graph) -> np.ndarray:
    if g.n == 0:
        return np.zeros((0, 0))
    return shortest_path(g.sparse_adjacency(), method="D", directed=False)


def check_stretch(g: Graph, h: Graph, mult: float, add: float = 0.0) -> StretchReport:
    """Max over connected pairs of d_H - (mult * d_G + add); pass iff <= 0."""
    _check_subgraph(g, h)
    dg, dh = apsp(g), apsp(h)
    finite = np.isfinite(dg)
    if not finite.any():
        return StretchReport(-math.inf, None, True, mult, add)
    slack = np.full(dg.shape, -math.inf)
    allowed = mult * dg[finite] + add
    slack[finite] = dh[finite] - allowed
    idx = np.unravel_index(np.argmax(slack), slack.shape)
    worst = float(slack[idx])
    tol = CHECK_ATOL * max(1.0, float(np.max(dg[finite])) * max(mult, 1.0))
    pair = (int(idx[0]), int(idx[1]))
    return StretchReport(worst, pair, worst <= tol, mult, add)


def check_resistance_bound(g_residual: Graph, bundle, t: int | None = None) -> ResistanceReport:
    """Every non-bundle edge e must satisfy R(e) <= log2(n) / (t * W(e)).

    R is measured in the union of bundle and residual, and separately in the
    bundle alone (which upper-bounds it by monotonicity).
    """
    if t is None:
        t = bundle.t
    full = bundle.union.union(g_residual)
    n = full.n
    logn = math.log2(n) if n > 1 else 0.0
    pinv_full = laplacian_pinv(full)
    pinv_bundle = laplacian_pinv(bundle.union)
    labels = components(bundle.union)
    in_bundle = set(bundle.union.edge_keys())
    worst = worst_b = -math.inf
    checked = violations = 0
    for u, v, w in g_residual.edges():
        if (u, v) in in_bundle:
            continue
        checked += 1
        bound = logn / (t * w)
        r_full = pinv_full[u, u] + pinv_full[v, v] - 2 * pinv_full[u, v]
        if labels[u] != labels[v]:
            r_bundle = math.inf
        else:
            r_bundle = pinv_bundle[u, u] + pinv_bundle[v, v] - 2 * pinv_bundle[u, v]
        ratio, ratio_b = r_full / bound, r_bundle / bound
        worst, worst_b = max(worst, ratio), max(worst_b, ratio_b)
        if ratio > 1 + 1e-9 or ratio_b > 1 + 1e-9:
            violations += 1
    return ResistanceReport(float(worst), float(worst_b), checked, violations, violations == 0)


def _conductances(lap: np.ndarray, deg: np.ndarray, sets: np.ndarray):
    x = sets.astype(float)
    cut = np.einsum("ij,jk,ik->i", x, lap, x)
    vol = x @ deg
    return cut, vol


def check_conductance_preservation(g: Graph, h: Graph, num_sets: int = 1000, seed: int = 0,
                                   *, exhaustive: bool = False) -> ConductanceReport:
    """0.5 * phi_G(S) <= phi_H(S) <= 2 * phi_G(S) on singletons plus sampled sets.

    ``exhaustive`` checks every non-empty proper subset instead (n <= 20).
    Sets with zero volume in either graph are skipped.
    """
    _check_subgraph(g, h)
    n = g.n
    if exhaustive:
        if n > 20:
            raise ValueError("exhaustive conductance check is limited to n <= 20")
        codes = np.arange(1, (1 << n) - 1, dtype=np.int64)
        sets = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    else:
        rng = generator(seed, "conductance-sets")
        rows = [np.eye(n, dtype=bool)]
        if n > 1:
            sizes = rng.integers(1, n, size=num_sets)
            sampled = np.zeros((num_sets, n), dtype=bool)
            for i, size in enumerate(sizes.tolist()):
                sampled[i, rng.choice(n, size=size, replace=False)] = True
            rows.append(sampled)
        sets = np.concatenate(rows)
    cut_g, vol_g = _conductances(laplacian(g), g.degrees(), sets)
    cut_h, vol_h = _conductances(laplacian(h), h.degrees(), sets)
    ok = (vol_g > 0) & (vol_h > 0)
    phi_g = np.where(ok, cut_g / np.where(ok, vol_g, 1), 0)
    phi_h = np.where(ok, cut_h / np.where(ok, vol_h, 1), 0)
    tol = 1e-12
    bad = ok & ((phi_h < 0.5 * phi_g - tol) | (phi_h > 2.0 * phi_g + tol))
    pos = ok & (phi_g > tol)
    ratios = phi_h[pos] / phi_g[pos]
    worst = [np.flatnonzero(r).tolist() for r in sets[bad][:5]]
    return ConductanceReport(
        int(ok.sum()), int((~ok).sum()), int(bad.sum()),
        float(ratios.min()) if ratios.size else 1.0,
        float(ratios.max()) if ratios.size else 1.0,
        not bad.any(), worst,
    )


def path_stretch(g: Graph, path, e) -> float:
    """W(e) * sum of 1/W(e') over a path joining the endpoints of e."""
    u, v = canon(*e[:2])
    if not g.has_edge(u, v):
        raise NotAPath(f"edge {(u, v)} is not in the graph")
    steps = [canon(*p[:2]) for p in path]
    if not steps:
        raise NotAPath("empty path")
    for a, b in steps:
        if not g.has_edge(a, b):
            raise NotAPath(f"path edge {(a, b)} is not in the graph")
    if not (_walks(steps, u, v) or _walks(steps, v, u)):
        raise NotAPath(f"edges do not form a path from {u} to {v}")
    return g.weight(u, v) * sum(1.0 / g.weight(a, b) for a, b in steps)


def _walks(steps, start, end) -> bool:
    cur = start
    seen = {start}
    for a, b in steps:
        if a == cur:
            cur = b
        elif b == cur:
            cur = a
        else:
            return False
        if cur in seen:
            return False
        seen.add(cur)
    return cur == end


__all__ = ["SpectralReport", "StretchReport", "ResistanceReport", "ConductanceReport",
           "check_spectral_sparsifier", "check_stretch", "check_resistance_bound",
           "check_conductance_preservation", "path_stretch", "apsp", "same_components"]
