"""Weighted undirected graphs, Laplacians, distances and random generators.

Vertices are ``0..n-1``. An edge is identified by its canonical pair
``(u, v)`` with ``u < v``; weights are positive floats. All logarithms in
algorithm parameters are base 2.
"""
from __future__ import annotations

import heapq
import math
from collections.abc import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from . import kernels
from .errors import DisconnectedPair, TooManyEdges, ZeroVolume

Edge = tuple[int, int]

# w_max <= n ** WEIGHT_EXPONENT is enforced at construction
WEIGHT_EXPONENT = 6.0
PINV_RTOL = 1e-9


def canon(u: int, v: int) -> Edge:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple weighted undirected graph on ``n`` vertices.

    ``edges`` may be a mapping ``{(u, v): w}`` or an iterable of ``(u, v)``
    or ``(u, v, w)`` tuples; missing weights default to 1.
    """

    __slots__ = ("n", "_w", "_csr", "_keys")

    def __init__(self, n: int, edges=(), *, weight_exponent: float | None = WEIGHT_EXPONENT):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = int(n)
        items = edges.items() if isinstance(edges, Mapping) else edges
        w: dict[Edge, float] = {}
        for item in items:
            if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], tuple):
                (u, v), wt = item
            elif len(item) == 2:
                (u, v), wt = item, 1.0
            else:
                u, v, wt = item
            u, v, wt = int(u), int(v), float(wt)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range [0, {self.n})")
            if not wt > 0 or not math.isfinite(wt):
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {wt}")
            key = canon(u, v)
            if key in w:
                raise ValueError(f"duplicate edge {key}")
            w[key] = wt
        if w and weight_exponent is not None and self.n > 1:
            cap = float(self.n) ** weight_exponent
            if max(w.values()) > cap:
                raise ValueError(f"max weight exceeds n^{weight_exponent:g} = {cap:g}")
        self._w = w
        self._csr = None
        self._keys = None

    # -- basic access -----------------------------------------------------
    @property
    def m(self) -> int:
        return len(self._w)

    def __len__(self) -> int:
        return len(self._w)

    def __contains__(self, e) -> bool:
        return canon(*e[:2]) in self._w

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._w == other._w

    def __hash__(self):
        return hash((self.n, frozenset(self._w.items())))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def edge_keys(self) -> list[Edge]:
        """Canonical edge pairs in lexicographic order."""
        if self._keys is None:
            self._keys = sorted(self._w)
        return self._keys

    def edges(self) -> list[tuple[int, int, float]]:
        return [(u, v, self._w[(u, v)]) for u, v in self.edge_keys()]

    def weight(self, u: int, v: int) -> float:
        return self._w[canon(u, v)]

    def weights(self) -> dict[Edge, float]:
        return dict(self._w)

    def has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self._w

    @property
    def w_max(self) -> float:
        return max(self._w.values(), default=1.0)

    def total_weight(self) -> float:
        return float(sum(self._w.values()))

    def is_unit(self) -> bool:
        return all(w == 1.0 for w in self._w.values())

    def degrees(self) -> np.ndarray:
        """Weighted degrees."""
        d = np.zeros(self.n)
        for (u, v), w in self._w.items():
            d[u] += w
            d[v] += w
        return d

    def hop_degrees(self) -> np.ndarray:
        indptr, _ = self.csr()
        return np.diff(indptr)

    def neighbors(self, u: int) -> np.ndarray:
        indptr, indices = self.csr()
        return indices[indptr[u]:indptr[u + 1]]

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Unweighted CSR adjacency ``(indptr, indices)`` with sorted neighbours."""
        if self._csr is None:
            keys = self.edge_keys()
            if keys:
                arr = np.asarray(keys, dtype=np.int64)
                src = np.concatenate([arr[:, 0], arr[:, 1]])
                dst = np.concatenate([arr[:, 1], arr[:, 0]])
                order = np.lexsort((dst, src))
                src, dst = src[order], dst[order]
            else:
                src = dst = np.empty(0, dtype=np.int64)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._csr = (indptr, np.ascontiguousarray(dst))
        return self._csr

    def adjacency(self) -> np.ndarray:
        """Dense weighted adjacency matrix."""
        a = np.zeros((self.n, self.n))
        for (u, v), w in self._w.items():
            a[u, v] = a[v, u] = w
        return a

    def sparse_adjacency(self) -> csr_matrix:
        keys = self.edge_keys()
        if not keys:
            return csr_matrix((self.n, self.n))
        arr = np.asarray(keys)
        w = np.array([self._w[k] for k in keys])
        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        return csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n))

    # -- derived graphs ---------------------------------------------------
    def subgraph(self, keys: Iterable[Edge]) -> Graph:
        """Graph on the same vertices keeping only ``keys`` (original weights)."""
        return Graph(self.n, {canon(*k): self._w[canon(*k)] for k in keys}, weight_exponent=None)

    def without(self, keys: Iterable[Edge]) -> Graph:
        drop = {canon(*k) for k in keys}
        return Graph(self.n, {k: w for k, w in self._w.items() if k not in drop}, weight_exponent=None)

    def union(self, other: Graph) -> Graph:
        """Edge union; shared edges must carry equal weights."""
        if other.n != self.n:
            raise ValueError("vertex counts differ")
        merged = dict(self._w)
        for k, w in other._w.items():
            if k in merged and merged[k] != w:
                raise ValueError(f"edge {k} has conflicting weights {merged[k]} and {w}")
            merged[k] = w
        return Graph(self.n, merged, weight_exponent=None)

    def scaled(self, factor: float) -> Graph:
        return Graph(self.n, {k: w * factor for k, w in self._w.items()}, weight_exponent=None)

    def unit(self) -> Graph:
        return Graph(self.n, dict.fromkeys(self._w, 1.0))


class Partition:
    """k-way node partition: ``assignment[v]`` is the cluster of vertex v."""

    __slots__ = ("assignment", "k")

    def __init__(self, assignment, k: int | None = None):
        a = np.asarray(assignment, dtype=np.int64).copy()
        if a.ndim != 1:
            raise ValueError("assignment must be one-dimensional")
        if k is None:
            k = int(a.max()) + 1 if a.size else 0
        if a.size and (a.min() < 0 or a.max() >= k):
            raise ValueError(f"cluster ids must lie in [0, {k})")
        a.setflags(write=False)
        self.assignment = a
        self.k = int(k)

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    def clusters(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == c) for c in range(self.k)]

    def canonical(self) -> Partition:
        """Relabel so clusters are numbered by their smallest vertex."""
        mapping: dict[int, int] = {}
        for c in self.assignment.tolist():
            if c not in mapping:
                mapping[c] = len(mapping)
        for c in range(self.k):
            mapping.setdefault(c, len(mapping))
        return Partition([mapping[c] for c in self.assignment.tolist()], self.k)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Partition) and self.k == other.k
                and np.array_equal(self.assignment, other.assignment))

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, k={self.k})"


def as_mask(n: int, s) -> np.ndarray:
    """Boolean membership vector for a node set given as indices or a mask."""
    arr = np.asarray(s)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise ValueError("mask length must equal n")
        return arr
    mask = np.zeros(n, dtype=bool)
    if arr.size:
        idx = arr.astype(np.int64).ravel()
        if idx.min() < 0 or idx.max() >= n:
            raise ValueError("node set outside vertex range")
        mask[idx] = True
    return mask


# -- spectral quantities ----------------------------------------------------
def laplacian(g: Graph) -> np.ndarray:
    """Dense combinatorial Laplacian D - A."""
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def normalized_laplacian(g: Graph) -> np.ndarray:
    """D^{-1/2} L D^{-1/2}; isolated vertices give zero rows and columns."""
    lap = laplacian(g)
    d = np.diag(lap).copy()
    inv = np.zeros_like(d)
    nz = d > 0
    inv[nz] = 1.0 / np.sqrt(d[nz])
    return inv[:, None] * lap * inv[None, :]


def laplacian_pinv(g: Graph) -> np.ndarray:
    """Moore-Penrose pseudoinverse of L via eigendecomposition."""
    vals, vecs = np.linalg.eigh(laplacian(g))
    if g.n == 0:
        return np.zeros((0, 0))
    cut = PINV_RTOL * max(vals[-1], 0.0)
    keep = vals > cut
    inv = np.zeros_like(vals)
    inv[keep] = 1.0 / vals[keep]
    return (vecs * inv) @ vecs.T


def components(g: Graph) -> np.ndarray:
    """Connected-component label per vertex."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    _, labels = _cc(g.sparse_adjacency(), directed=False)
    return labels.astype(np.int64)


def effective_resistance(g: Graph, u: int, v: int, pinv: np.ndarray | None = None) -> float:
    """(e_u - e_v)^T L^+ (e_u - e_v); raises DisconnectedPair across components."""
    if u == v:
        return 0.0
    labels = components(g)
    if labels[u] != labels[v]:
        raise DisconnectedPair(f"vertices {u} and {v} are not connected")
    if pinv is None:
        pinv = laplacian_pinv(g)
    return float(pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v])


def volume(g: Graph, s) -> float:
    return float(g.degrees()[as_mask(g.n, s)].sum())


def cut_weight(g: Graph, s) -> float:
    mask = as_mask(g.n, s)
    return float(sum(w for (u, v), w in g.weights().items() if mask[u] != mask[v]))


def conductance(g: Graph, s) -> float:
    vol = volume(g, s)
    if vol <= 0:
        raise ZeroVolume("node set has zero volume")
    return cut_weight(g, s) / vol


# -- distances ----------------------------------------------------------------
def weighted_distance(g: Graph, u: int, v: int) -> float:
    """Dijkstra shortest-path distance; ``inf`` when disconnected."""
    if u == v:
        return 0.0
    indptr, indices = g.csr()
    dist = {u: 0.0}
    heap = [(0.0, u)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        if x == v:
            return d
        done.add(x)
        for y in indices[indptr[x]:indptr[x + 1]].tolist():
            nd = d + g.weight(x, y)
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return math.inf


def hop_distance_bounded(g: Graph, u: int, v: int, limit: int) -> int | None:
    """Unweighted hop distance if at most ``limit``, else None."""
    if limit < 0:
        raise ValueError("limit must be non-negative")
    indptr, indices = g.csr()
    d = kernels.bounded_hops(g.n, indptr, indices, int(u), int(v), int(limit))
    return None if d < 0 else int(d)


def hop_distances(g: Graph, src: int) -> np.ndarray:
    """BFS hop distances from ``src``; -1 where unreachable."""
    indptr, indices = g.csr()
    return kernels.bfs_hops(g.n, indptr, indices, int(src))


def girth(g: Graph) -> float:
    """Shortest cycle length in edges; ``inf`` for forests."""
    indptr, indices = g.csr()
    c = kernels.girth(g.n, indptr, indices)
    return math.inf if c < 0 else int(c)


# -- generators ---------------------------------------------------------------
def gen_sbm(block_sizes, p_in: float, p_out: float, seed: int) -> tuple[Graph, Partition]:
    """Unit-weight stochastic block model and its ground-truth partition."""
    if not (0.0 <= p_in <= 1.0 and 0.0 <= p_out <= 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    sizes = [int(b) for b in block_sizes]
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = labels.size
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[iv], p_in, p_out)
    keep = rng.random(iu.size) < prob
    g = Graph(n, zip(iu[keep].tolist(), iv[keep].tolist()))
    return g, Partition(labels, len(sizes))


def gen_weighted_random(n: int, m: int, w_max: int, seed: int) -> Graph:
    """``m`` distinct uniformly random edges with integer weights in [1, w_max]."""
    total = n * (n - 1) // 2
    if m > total:
        raise TooManyEdges(f"{m} edges requested but only {total} pairs exist on {n} vertices")
    if w_max < 1:
        raise ValueError("w_max must be at least 1")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    pick = np.sort(rng.choice(total, size=m, replace=False))
    w = rng.integers(1, int(w_max) + 1, size=m)
    return Graph(n, zip(iu[pick].tolist(), iv[pick].tolist(), w.astype(float).tolist()))


def gen_unit_random(n: int, m: int, seed: int) -> Graph:
    return gen_weighted_random(n, m, 1, seed)
