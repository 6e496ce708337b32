# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels. Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef i64 _reach(i64 u, i64 v, i64 limit, i64[::1] head, i64[::1] nxt,
                i64[::1] to, i64[::1] dist, i64[::1] queue) noexcept nogil:
    # BFS over a linked-list adjacency; dist must be all -1 on entry and is
    # restored before returning.
    cdef i64 qh = 0, qt = 0, x, y, e, dx, found = -1, i
    if u == v:
        return 0
    if limit <= 0:
        return -1
    dist[u] = 0
    queue[qt] = u
    qt += 1
    while qh < qt and found < 0:
        x = queue[qh]
        qh += 1
        dx = dist[x]
        if dx >= limit:
            continue
        e = head[x]
        while e >= 0:
            y = to[e]
            if dist[y] < 0:
                dist[y] = dx + 1
                if y == v:
                    found = dx + 1
                    break
                queue[qt] = y
                qt += 1
            e = nxt[e]
    for i in range(qt):
        dist[queue[i]] = -1
    dist[v] = -1
    return found


def greedy_spanner(i64 n, cand_u, cand_v, i64 max_hops):
    cdef i64[::1] cu = np.ascontiguousarray(cand_u, dtype=np.int64)
    cdef i64[::1] cv = np.ascontiguousarray(cand_v, dtype=np.int64)
    cdef i64 m = cu.shape[0]
    out = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] acc = out
    cdef i64[::1] head = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] nxt = np.empty(max(2 * m, 1), dtype=np.int64)
    cdef i64[::1] to = np.empty(max(2 * m, 1), dtype=np.int64)
    cdef i64[::1] dist = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef i64 i, u, v, ne = 0
    with nogil:
        for i in range(m):
            u = cu[i]
            v = cv[i]
            if _reach(u, v, max_hops, head, nxt, to, dist, queue) < 0:
                to[ne] = v
                nxt[ne] = head[u]
                head[u] = ne
                ne += 1
                to[ne] = u
                nxt[ne] = head[v]
                head[v] = ne
                ne += 1
                acc[i] = 1
    return out


cdef void _csr_to_lists(i64 n, i64[::1] ip, i64[::1] ix, i64[::1] head,
                        i64[::1] nxt, i64[::1] to) noexcept nogil:
    cdef i64 x, j
    for x in range(n):
        head[x] = -1
    # reverse insertion keeps the CSR neighbour order
    for x in range(n):
        j = ip[x + 1] - 1
        while j >= ip[x]:
            to[j] = ix[j]
            nxt[j] = head[x]
            head[x] = j
            j -= 1


def bounded_hops(i64 n, indptr, indices, i64 u, i64 v, i64 limit):
    cdef i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef i64 nnz = ix.shape[0]
    cdef i64[::1] head = np.empty(max(n, 1), dtype=np.int64)
    cdef i64[::1] nxt = np.empty(max(nnz, 1), dtype=np.int64)
    cdef i64[::1] to = np.empty(max(nnz, 1), dtype=np.int64)
    cdef i64[::1] dist = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef i64 r
    with nogil:
        _csr_to_lists(n, ip, ix, head, nxt, to)
        r = _reach(u, v, limit, head, nxt, to, dist, queue)
    return r


def girth(i64 n, indptr, indices):
    cdef i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef i64[::1] dist = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] parent = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef i64 best = -1, root, qh, qt, x, y, j, cyc, i
    cdef bint stop
    with nogil:
        for root in range(n):
            qh = 0
            qt = 0
            dist[root] = 0
            parent[root] = -1
            queue[qt] = root
            qt += 1
            stop = False
            while qh < qt and not stop:
                x = queue[qh]
                qh += 1
                if best >= 0 and 2 * dist[x] >= best:
                    stop = True
                    break
                for j in range(ip[x], ip[x + 1]):
                    y = ix[j]
                    if dist[y] < 0:
                        dist[y] = dist[x] + 1
                        parent[y] = x
                        queue[qt] = y
                        qt += 1
                    elif parent[x] != y:
                        cyc = dist[x] + dist[y] + 1
                        if best < 0 or cyc < best:
                            best = cyc
            for i in range(qt):
                dist[queue[i]] = -1
                parent[queue[i]] = -1
    return best


def bfs_hops(i64 n, indptr, indices, i64 src):
    cdef i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    out = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] dist = out
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef i64 qh = 0, qt = 0, x, y, j
    with nogil:
        dist[src] = 0
        queue[qt] = src
        qt += 1
        while qh < qt:
            x = queue[qh]
            qh += 1
            for j in range(ip[x], ip[x + 1]):
                y = ix[j]
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue[qt] = y
                    qt += 1
    return out
