"""Core numbers by bucket peeling (Batagelj-Zaversnik)."""

import numpy as np

from .graph import Graph


def core_number(g: Graph) -> np.ndarray:
    """Largest k such that each node belongs to the k-core."""
    n = g.n
    deg = g.degree.astype(np.int64).copy()
    if n == 0:
        return deg
    adj = g.adjacency
    max_deg = int(deg.max())
    bins = np.bincount(deg, minlength=max_deg + 1)
    start = np.concatenate([[0], np.cumsum(bins)[:-1]])
    order = np.argsort(deg, kind="stable")
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    start = start.tolist()
    order = order.tolist()
    pos = pos.tolist()
    deg = deg.tolist()
    for i in range(n):
        v = order[i]
        for u in adj[v]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = start[du]
                w = order[pw]
                if u != w:
                    order[pu], order[pw] = w, u
                    pos[u], pos[w] = pw, pu
                start[du] += 1
                deg[u] -= 1
    return np.asarray(deg, dtype=np.int64)


def core_number_peeling(g: Graph) -> np.ndarray:
    """Reference implementation: repeatedly strip nodes of degree < k."""
    alive = set(range(g.n))
    deg = {v: len(g.neighbors(v)) for v in alive}
    core = np.zeros(g.n, dtype=np.int64)
    k = 0
    while alive:
        low = [v for v in alive if deg[v] <= k]
        if not low:
            k += 1
            continue
        for v in low:
            core[v] = k
            alive.discard(v)
            for u in g.neighbors(v):
                if u in alive:
                    deg[u] -= 1
    return core
