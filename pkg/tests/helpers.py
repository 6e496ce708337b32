import itertools

from dupsparse.graph import Graph


def complete(n, w=1.0):
    return Graph(n, [(u, v, w) for u, v in itertools.combinations(range(n), 2)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves):
    return Graph(leaves + 1, [(0, v) for v in range(1, leaves + 1)])


def bfs_within(adj, u, v, limit):
    """Plain-dict BFS: is v within ``limit`` hops of u?"""
    if u == v:
        return True
    frontier, seen = [u], {u}
    for _ in range(limit):
        nxt = []
        for x in frontier:
            for y in adj.get(x, ()):
                if y == v:
                    return True
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return False


def greedy_oracle(order, limit):
    """Reference greedy: keep an edge unless its endpoints are within ``limit`` hops."""
    adj, kept = {}, []
    for u, v in order:
        if not bfs_within(adj, u, v, limit):
            kept.append((u, v))
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
    return kept


# acceptance outcomes, printed by the terminal-summary hook in conftest
ACCEPTANCE = []


def record(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
    ACCEPTANCE.append((number, line + (f" ({detail})" if detail else "")))
    print(ACCEPTANCE[-1][1])
    return passed
