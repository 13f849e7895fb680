"""Immutable simple undirected graphs with contiguous integer node ids."""

from __future__ import annotations

import logging
from collections import deque
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

log = logging.getLogger(__name__)

# explicit marker for "no path"; never an in-band large number
UNREACHABLE = -1

COMMENT_PREFIXES = ("#", "%")


class GraphError(ValueError):
    pass


class EdgeListParseError(GraphError):
    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class Graph:
    """Simple undirected graph on nodes ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v``.  Self-loops and
    duplicate edges are discarded at construction; the number of each is
    kept in ``dropped_self_loops`` / ``dropped_duplicates``.

    ``labels`` maps index -> original label (defaults to the index itself).
    """

    __slots__ = (
        "_n", "_edges", "_adj", "_degree", "_labels", "_index",
        "_csr", "dropped_self_loops", "dropped_duplicates",
    )

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (),
                 labels: Sequence | None = None):
        if n < 0:
            raise GraphError("node count must be non-negative")
        self._n = int(n)
        seen = set()
        loops = dups = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                loops += 1
                continue
            e = (u, v) if u < v else (v, u)
            if e in seen:
                dups += 1
                continue
            seen.add(e)
        self._edges = tuple(sorted(seen))
        adj = [[] for _ in range(n)]
        for u, v in self._edges:
            adj[u].append(v)
            adj[v].append(u)
        for a in adj:
            a.sort()
        self._adj = tuple(tuple(a) for a in adj)
        self._degree = np.fromiter((len(a) for a in adj), dtype=np.int64, count=n)
        if labels is None:
            self._labels = tuple(range(n))
        else:
            if len(labels) != n:
                raise GraphError("label count does not match node count")
            self._labels = tuple(labels)
        self._index = None
        self._csr = None
        self.dropped_self_loops = loops
        self.dropped_duplicates = dups

    # -- basic accessors -------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    def __len__(self):
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def degree(self) -> np.ndarray:
        d = self._degree.view()
        d.flags.writeable = False
        return d

    @property
    def labels(self) -> tuple:
        return self._labels

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    def index_of(self, label) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self._labels)}
        return self._index[label]

    def has_edge(self, u: int, v: int) -> bool:
        a = self._adj[u]
        # adjacency lists are sorted
        lo, hi = 0, len(a)
        while lo < hi:
            mid = (lo + hi) // 2
            if a[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(a) and a[lo] == v

    def edge_set(self) -> set[frozenset]:
        """Edges as frozensets of labels (order-independent comparison)."""
        lab = self._labels
        return {frozenset((lab[u], lab[v])) for u, v in self._edges}

    def to_csr(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix (cached)."""
        if self._csr is None:
            if self.m:
                e = np.asarray(self._edges, dtype=np.int64)
                rows = np.concatenate([e[:, 0], e[:, 1]])
                cols = np.concatenate([e[:, 1], e[:, 0]])
            else:
                rows = cols = np.zeros(0, dtype=np.int64)
            data = np.ones(len(rows), dtype=np.float64)
            self._csr = sparse.csr_matrix((data, (rows, cols)), shape=(self._n, self._n))
        return self._csr

    def relabeled(self, labels: Sequence) -> "Graph":
        return Graph(self._n, self._edges, labels)

    def __repr__(self):
        return f"Graph(n={self._n}, m={self.m})"


# -- ingestion / serialization ------------------------------------------

def _content_lines(lines: Iterable[str]):
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        yield line_no, line


def load_edge_list(lines: Iterable[str] | str) -> Graph:
    """Parse a whitespace separated edge list.

    Labels are mapped to indices in order of first appearance.  Lines
    starting with ``#`` or ``%`` are comments.  Duplicate edges and
    self-loops are dropped (and counted, with a warning).
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    index: dict[str, int] = {}
    labels: list[str] = []
    pairs = []
    for line_no, line in _content_lines(lines):
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"expected 2 node labels, found {len(tokens)}", line_no)
        ids = []
        for tok in tokens:
            i = index.get(tok)
            if i is None:
                i = index[tok] = len(labels)
                labels.append(tok)
            ids.append(i)
        pairs.append(tuple(ids))
    if not pairs:
        raise EdgeListParseError("edge list is empty")
    g = Graph(len(labels), pairs, labels)
    if g.dropped_duplicates or g.dropped_self_loops:
        log.warning("dropped %d duplicate edge(s) and %d self-loop(s)",
                    g.dropped_duplicates, g.dropped_self_loops)
    return g


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def format_edge_list(g: Graph) -> str:
    lab = g.labels
    return "".join(f"{lab[u]} {lab[v]}\n" for u, v in g.edges)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g))


def write_label_map(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label,index\n")
        for i, lab in enumerate(g.labels):
            fh.write(f"{lab},{i}\n")


# -- traversal ------------------------------------------------------------

def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop counts from ``source``; unreachable nodes hold ``UNREACHABLE``."""
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} out of range for n={g.n}")
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    adj = g.adjacency
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adj[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = du
                queue.append(v)
    return dist


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Dense hop-count matrix, ``UNREACHABLE`` for disconnected pairs."""
    from scipy.sparse.csgraph import shortest_path

    if g.n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    d = shortest_path(g.to_csr(), method="D", directed=False, unweighted=True)
    out = np.full(d.shape, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(d)
    out[finite] = d[finite].astype(np.int64)
    return out


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by smallest member."""
    seen = np.zeros(g.n, dtype=bool)
    adj = g.adjacency
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comp.sort()
        comps.append(comp)
    return comps


def component_labels(g: Graph) -> np.ndarray:
    lab = np.empty(g.n, dtype=np.int64)
    for c, comp in enumerate(connected_components(g)):
        lab[comp] = c
    return lab


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` plus the array mapping new index -> parent index.

    Node order follows ascending parent index.
    """
    keep = np.array(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    if len(keep) and (keep[0] < 0 or keep[-1] >= g.n):
        raise GraphError("subgraph nodes out of range")
    local = {int(v): i for i, v in enumerate(keep)}
    edges = []
    for u in keep:
        iu = local[int(u)]
        for v in g.neighbors(int(u)):
            if v > u and v in local:
                edges.append((iu, local[v]))
    labels = [g.labels[int(v)] for v in keep]
    return Graph(len(keep), edges, labels), keep


def giant_component(g: Graph) -> tuple[Graph, np.ndarray]:
    comps = connected_components(g)
    if not comps:
        return g, np.arange(0)
    big = max(comps, key=len)
    return induced_subgraph(g, big)
