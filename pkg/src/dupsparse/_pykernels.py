"""Pure-Python versions of the hot graph kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Adjacency is passed in CSR form (``indptr``, ``indices``) over vertices
``0..n-1``; hop counts are unweighted.
"""
from collections import deque

import numpy as np


def greedy_spanner(n, cand_u, cand_v, max_hops):
    """Greedy hop-bounded insertion over candidate edges, in the given order.

    Candidate ``i`` is accepted iff its endpoints are more than ``max_hops``
    hops apart in the graph formed by the candidates accepted before it.
    Returns a uint8 mask over candidates.
    """
    m = len(cand_u)
    accepted = np.zeros(m, dtype=np.uint8)
    adj = [[] for _ in range(n)]
    dist = [-1] * n
    for i in range(m):
        u = int(cand_u[i])
        v = int(cand_v[i])
        if _reach_within(adj, dist, u, v, max_hops) < 0:
            adj[u].append(v)
            adj[v].append(u)
            accepted[i] = 1
    return accepted


def _reach_within(adj, dist, u, v, limit):
    if u == v:
        return 0
    if limit <= 0:
        return -1
    touched = [u]
    dist[u] = 0
    queue = deque([u])
    found = -1
    while queue:
        x = queue.popleft()
        dx = dist[x]
        if dx >= limit:
            continue
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dx + 1
                if y == v:
                    found = dx + 1
                    queue.clear()
                    break
                touched.append(y)
                queue.append(y)
    for x in touched:
        dist[x] = -1
    dist[v] = -1
    return found


def bounded_hops(n, indptr, indices, u, v, limit):
    """Hop distance from ``u`` to ``v`` if at most ``limit``, else -1."""
    adj = _lists(n, indptr, indices)
    return _reach_within(adj, [-1] * n, int(u), int(v), int(limit))


def girth(n, indptr, indices):
    """Length of the shortest cycle, or -1 for a forest."""
    adj = _lists(n, indptr, indices)
    best = -1
    for root in range(n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if best >= 0 and 2 * dx >= best:
                break
            for y in adj[x]:
                dy = dist.get(y)
                if dy is None:
                    dist[y] = dx + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    cyc = dx + dy + 1
                    if best < 0 or cyc < best:
                        best = cyc
    return best


def bfs_hops(n, indptr, indices, src):
    """Hop distances from ``src`` (-1 where unreachable)."""
    adj = _lists(n, indptr, indices)
    dist = [-1] * n
    dist[src] = 0
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return np.asarray(dist, dtype=np.int64)


def _lists(n, indptr, indices):
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    return [indices[indptr[x]:indptr[x + 1]] for x in range(n)]
