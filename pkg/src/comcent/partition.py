"""Community partitions, Louvain detection and mixing-parameter classes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import COMMENT_PREFIXES, Graph


class PartitionError(ValueError):
    pass


class Partition:
    """Node -> community assignment with ids normalized to ``0..C-1``.

    Ids are renumbered by first appearance when scanning nodes in index
    order, so two partitions with the same blocks compare equal.
    """

    __slots__ = ("_community_of", "_communities", "_sizes")

    def __init__(self, community_of: Sequence):
        raw = list(community_of)
        remap: dict = {}
        out = np.empty(len(raw), dtype=np.int64)
        for i, c in enumerate(raw):
            if c is None:
                raise PartitionError(f"node {i} has no community")
            out[i] = remap.setdefault(c, len(remap))
        out.flags.writeable = False
        self._community_of = out
        members = [[] for _ in range(len(remap))]
        for i, c in enumerate(out):
            members[c].append(i)
        self._communities = tuple(tuple(m) for m in members)
        self._sizes = np.array([len(m) for m in members], dtype=np.int64)
        self._sizes.flags.writeable = False

    @classmethod
    def from_sets(cls, n: int, communities: Iterable[Iterable[int]]) -> "Partition":
        cof: list = [None] * n
        for c, block in enumerate(communities):
            for v in block:
                if cof[v] is not None:
                    raise PartitionError(f"node {v} assigned twice")
                cof[v] = c
        return cls(cof)

    @classmethod
    def single(cls, n: int) -> "Partition":
        return cls([0] * n)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(range(n))

    @property
    def community_of(self) -> np.ndarray:
        return self._community_of

    @property
    def communities(self) -> tuple[tuple[int, ...], ...]:
        return self._communities

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes

    @property
    def n(self) -> int:
        return len(self._community_of)

    @property
    def count(self) -> int:
        return len(self._communities)

    def __len__(self):
        return len(self._communities)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self._community_of, other._community_of)

    def __hash__(self):
        return hash(self._community_of.tobytes())

    def __repr__(self):
        return f"Partition(n={self.n}, communities={self.count})"


def _check_covers(g: Graph, p: Partition):
    if p.n != g.n:
        raise PartitionError(f"partition covers {p.n} nodes, graph has {g.n}")


def _intra_mask(g: Graph, p: Partition) -> np.ndarray:
    if not g.m:
        return np.zeros(0, dtype=bool)
    e = np.asarray(g.edges)
    c = p.community_of
    return c[e[:, 0]] == c[e[:, 1]]


def mixing_parameter(g: Graph, p: Partition) -> float:
    """Fraction of edges whose endpoints sit in different communities."""
    _check_covers(g, p)
    if g.m == 0:
        raise PartitionError("mixing parameter undefined on a graph without edges")
    intra = int(_intra_mask(g, p).sum())
    return (g.m - intra) / g.m


def modularity(g: Graph, p: Partition) -> float:
    _check_covers(g, p)
    m = g.m
    if m == 0:
        raise PartitionError("modularity undefined on a graph without edges")
    c = p.community_of
    e = np.asarray(g.edges)
    intra = np.bincount(c[e[:, 0]][_intra_mask(g, p)], minlength=p.count)
    dsum = np.bincount(c, weights=g.degree, minlength=p.count)
    return float(np.sum(intra / m - (dsum / (2.0 * m)) ** 2))


# -- Louvain -----------------------------------------------------------------

LOUVAIN_TOL = 1e-7
LOUVAIN_MAX_PASSES = 100


def _weighted_modularity(adj, loops, comm, two_m):
    # adj: list of dict neighbour->weight (no self entries); loops: self weight
    n_c = max(comm) + 1
    inside = np.zeros(n_c)
    tot = np.zeros(n_c)
    for u, nbrs in enumerate(adj):
        cu = comm[u]
        k = loops[u] + sum(nbrs.values())
        tot[cu] += k
        inside[cu] += loops[u]
        for v, w in nbrs.items():
            if comm[v] == cu:
                inside[cu] += w
    return float(np.sum(inside / two_m - (tot / two_m) ** 2))


def _one_level(adj, loops, two_m, rng):
    """Local-move phase on a weighted graph.  Returns community list."""
    n = len(adj)
    k = np.array([loops[u] + sum(adj[u].values()) for u in range(n)])
    comm = list(range(n))
    tot = k.astype(float).copy()
    order = rng.permutation(n)
    improved = True
    moved_any = False
    while improved:
        improved = False
        for u in order:
            u = int(u)
            cu = comm[u]
            ku = k[u]
            links: dict[int, float] = {}
            for v, w in adj[u].items():
                links[comm[v]] = links.get(comm[v], 0.0) + w
            tot[cu] -= ku
            base = links.get(cu, 0.0) - tot[cu] * ku / two_m
            best_c, best_gain = cu, base
            # ascending ids + strict comparison: ties go to the lowest id,
            # and a node only leaves its community for a strictly better one
            for c in sorted(links):
                if c == cu:
                    continue
                gain = links[c] - tot[c] * ku / two_m
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += ku
            if best_c != cu:
                comm[u] = best_c
                improved = True
                moved_any = True
    return comm, moved_any


def _aggregate(adj, loops, comm):
    remap = {}
    for c in comm:
        remap.setdefault(c, len(remap))
    new_comm = [remap[c] for c in comm]
    n_new = len(remap)
    new_adj = [dict() for _ in range(n_new)]
    new_loops = [0.0] * n_new
    for u, nbrs in enumerate(adj):
        cu = new_comm[u]
        new_loops[cu] += loops[u]
        for v, w in nbrs.items():
            cv = new_comm[v]
            if cu == cv:
                # each internal edge is seen from both ends
                new_loops[cu] += w
            else:
                new_adj[cu][cv] = new_adj[cu].get(cv, 0.0) + w
    return new_adj, new_loops, new_comm


def louvain(g: Graph, seed: int = 0, return_history: bool = False):
    """Greedy two-phase modularity maximisation (resolution 1).

    Node visiting order is shuffled with ``numpy.random.default_rng(seed)``
    at every level, so the output is a deterministic function of the seed.
    With ``return_history`` the modularity after each aggregation round is
    returned alongside the partition.
    """
    if g.m == 0:
        raise PartitionError("louvain needs at least one edge")
    rng = np.random.default_rng(seed)
    two_m = 2.0 * g.m
    adj = [{v: 1.0 for v in g.neighbors(u)} for u in range(g.n)]
    loops = [0.0] * g.n
    membership = np.arange(g.n)
    q = _weighted_modularity(adj, loops, list(range(g.n)), two_m)
    history = [q]
    for _ in range(LOUVAIN_MAX_PASSES):
        comm, moved = _one_level(adj, loops, two_m, rng)
        if not moved:
            break
        new_q = _weighted_modularity(adj, loops, comm, two_m)
        if new_q - q <= LOUVAIN_TOL:
            break
        adj, loops, level_comm = _aggregate(adj, loops, comm)
        membership = np.asarray(level_comm)[membership]
        q = new_q
        history.append(q)
    p = Partition(membership.tolist())
    if return_history:
        return p, history
    return p


# -- partition files ---------------------------------------------------------

def load_partition(lines: Iterable[str] | str, g: Graph) -> Partition:
    """Read ``label community_id`` lines against the labels of ``g``."""
    if isinstance(lines, str):
        lines = lines.splitlines()
    index = {str(lab): i for i, lab in enumerate(g.labels)}
    cof: list = [None] * g.n
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise PartitionError(f"line {line_no}: expected 'label community_id'")
        label, cid = tokens
        i = index.get(label)
        if i is None:
            raise PartitionError(f"unknown node {label}")
        if cof[i] is not None:
            raise PartitionError(f"duplicate assignment {label}")
        cof[i] = cid
    for i, c in enumerate(cof):
        if c is None:
            raise PartitionError(f"unassigned node {g.labels[i]}")
    return Partition(cof)


def read_partition(path, g: Graph) -> Partition:
    with open(path, encoding="utf-8") as fh:
        return load_partition(fh, g)


def format_partition(g: Graph, p: Partition) -> str:
    return "".join(f"{lab} {c}\n" for lab, c in zip(g.labels, p.community_of))


def write_partition(g: Graph, p: Partition, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_partition(g, p))


# -- community-structure strength -------------------------------------------

class Strength(enum.Enum):
    STRONG = "strong"
    MEDIUM = "medium"
    WEAK = "weak"


@dataclass(frozen=True)
class StrengthClass:
    strength: Strength
    mu: float


def classify_strength(mu: float) -> StrengthClass:
    """Bracket a mixing parameter into strong / medium / weak structure.

    ``[0, 0.20)`` is strong (values under 0.05 included), ``[0.20, 0.30]``
    medium and ``(0.30, 1]`` weak.
    """
    if not 0.0 <= mu <= 1.0 or np.isnan(mu):
        raise PartitionError(f"mixing parameter {mu} outside [0, 1]")
    if mu < 0.20:
        s = Strength.STRONG
    elif mu <= 0.30:
        s = Strength.MEDIUM
    else:
        s = Strength.WEAK
    return StrengthClass(s, float(mu))
