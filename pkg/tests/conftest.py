import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from comcent.graph import Graph, load_edge_list  # noqa: E402
from comcent.partition import Partition  # noqa: E402

TT_TEXT = "a b\na c\nb c\nc d\nd e\nd f\ne f\n"


def make_tt() -> Graph:
    return load_edge_list(TT_TEXT)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def two_triangles() -> Graph:
    return Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])


def random_graph(rng, n: int, p: float, min_degree: int = 0) -> Graph:
    """G(n, p); with ``min_degree=1`` isolated nodes get one random edge."""
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    edges = set(zip(iu[0][keep].tolist(), iu[1][keep].tolist()))
    if min_degree:
        deg = np.zeros(n, dtype=int)
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        for u in np.flatnonzero(deg == 0):
            v = int(rng.choice([x for x in range(n) if x != u]))
            edges.add((min(u, v), max(u, v)))
    return Graph(n, sorted(edges))


def random_partition(rng, n: int, k: int) -> Partition:
    return Partition(rng.integers(0, k, n).tolist())


@pytest.fixture
def tt():
    return make_tt()


@pytest.fixture
def p2():
    return Partition([0, 0, 0, 1, 1, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
