"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --n 512 --m-per-n 16 --repeat 3
"""
import argparse
import timeit

import numpy as np

from dupsparse import kernels
from dupsparse.graph import gen_unit_random
from dupsparse.spanner import cycle_hops


def workloads(n, m, seed):
    g = gen_unit_random(n, m, seed)
    order = np.asarray(g.edge_keys(), dtype=np.int64)
    indptr, indices = g.csr()
    limit = cycle_hops(2)
    return {
        "greedy_spanner": lambda b: b.greedy_spanner(n, order[:, 0], order[:, 1], limit),
        "bfs_hops": lambda b: b.bfs_hops(n, indptr, indices, 0),
        "bounded_hops": lambda b: [b.bounded_hops(n, indptr, indices, 0, v, limit)
                                   for v in range(0, n, max(1, n // 64))],
        "girth": lambda b: b.girth(n, indptr, indices),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--m-per-n", type=float, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    m = min(a.n * (a.n - 1) // 2, int(a.m_per_n * a.n))
    backends = {name: kernels.get_backend(name) for name in kernels.available_backends()}
    print(f"n={a.n} m={m} backends={','.join(backends)}")
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in workloads(a.n, m, a.seed).items():
        secs = {name: min(timeit.repeat(lambda b=b: fn(b), number=1, repeat=a.repeat))
                for name, b in backends.items()}
        speedup = secs["python"] / secs["cython"] if "cython" in secs else float("nan")
        print(f"{label:<16}" + "".join(f"{secs[name]:>11.4f}s" for name in backends)
              + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
