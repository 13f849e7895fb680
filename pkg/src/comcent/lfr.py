"""LFR-style benchmark graphs with planted communities.

Pipeline: power-law degrees and community sizes, node placement, per-
community configuration-model matching for intra-community stubs, global
matching for inter-community stubs, then degree-preserving swaps that pull
the realised mixing parameter onto the target.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph
from .partition import Partition

log = logging.getLogger(__name__)

MAX_RESTARTS = 100
REWIRE_BUDGET = 50          # swap attempts per edge
MATCH_ROUNDS = 20           # reshuffles of rejected stubs before swap repair
MAX_CAPPED_STUB_SHARE = 0.10
COMPENSATION_PASSES = 3
MAX_SHED = 2              # overflow stubs a capped node drops outright


class LfrError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class LfrParams:
    n: int = 2500
    avg_degree: float = 8.0
    max_degree: int = 27
    gamma: float = 2.7
    theta: float = 2.7
    mu: float = 0.05
    min_community: int = 4
    max_community: int = 250
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (self.gamma > 1 and self.theta > 1):
            raise ValueError("gamma and theta must exceed 1")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu={self.mu} outside [0, 1]")
        if not 1 <= self.min_community <= self.max_community:
            raise ValueError("need 1 <= min_community <= max_community")
        if not 1 <= self.avg_degree <= self.max_degree:
            raise ValueError("need 1 <= avg_degree <= max_degree")
        if self.max_degree >= self.n:
            raise ValueError("max_degree must be below n")

    def as_dict(self):
        return asdict(self)


# -- distributions -----------------------------------------------------------

def _degree_pmf(k_min: float, k_max: int, gamma: float):
    """Integer power law on ``[k_min, k_max]`` for a real-valued ``k_min``.

    The integer just below a fractional ``k_min`` keeps a share of its mass
    proportional to how far ``k_min`` sits from the next integer, which
    makes the mean continuous and increasing in ``k_min``.
    """
    lo = int(np.floor(k_min))
    support = np.arange(max(lo, 1), k_max + 1)
    w = support.astype(np.float64) ** -gamma
    frac = k_min - lo
    if frac > 0 and support[0] == lo:
        w[0] *= 1.0 - frac
    return support, w / w.sum()


def _mean_for(k_min, k_max, gamma):
    s, p = _degree_pmf(k_min, k_max, gamma)
    return float(s @ p)


def solve_k_min(avg_degree: float, max_degree: int, gamma: float, tol: float = 0.01) -> float:
    """Bisect the lower cut-off so the expected degree equals ``avg_degree``."""
    lo, hi = 1.0, float(max_degree)
    if avg_degree < _mean_for(lo, max_degree, gamma) - tol or avg_degree > max_degree:
        raise LfrError(f"no k_min in [1, {max_degree}] gives mean degree {avg_degree}")
    while True:
        mid = 0.5 * (lo + hi)
        mean = _mean_for(mid, max_degree, gamma)
        if abs(mean - avg_degree) <= tol or hi - lo < 1e-12:
            return mid
        if mean < avg_degree:
            lo = mid
        else:
            hi = mid


def sample_powerlaw_degrees(params: LfrParams, rng=None) -> np.ndarray:
    rng = np.random.default_rng(params.seed) if rng is None else rng
    if params.avg_degree == params.max_degree:
        deg = np.full(params.n, params.max_degree, dtype=np.int64)
    else:
        k_min = solve_k_min(params.avg_degree, params.max_degree, params.gamma)
        support, pmf = _degree_pmf(k_min, params.max_degree, params.gamma)
        deg = rng.choice(support, size=params.n, p=pmf).astype(np.int64)
    if deg.sum() % 2:
        pick = np.flatnonzero(deg > 1)
        if len(pick):
            deg[rng.choice(pick)] -= 1
        else:
            deg[rng.integers(params.n)] += 1
    return deg


def sample_community_sizes(params: LfrParams, rng=None) -> list[int]:
    """Power-law sizes summing to exactly ``n``, each within bounds."""
    rng = np.random.default_rng(params.seed) if rng is None else rng
    lo, hi, n = params.min_community, min(params.max_community, params.n), params.n
    if lo > n:
        raise LfrError(f"min_community={lo} exceeds n={n}")
    support = np.arange(lo, hi + 1)
    pmf = support.astype(np.float64) ** -params.theta
    pmf /= pmf.sum()
    sizes: list[int] = []
    total = 0
    while total < n:
        s = int(rng.choice(support, p=pmf))
        sizes.append(s)
        total += s
    excess = total - n
    for _ in range(1000):
        if sizes[-1] - excess >= lo:
            break
        # trimmed tail would fall below the minimum: redraw the last size
        total -= sizes.pop()
        while total < n:
            s = int(rng.choice(support, p=pmf))
            sizes.append(s)
            total += s
        excess = total - n
    if sizes[-1] - excess >= lo:
        sizes[-1] -= excess
    else:
        # deterministic repair: shave surplus from communities above the minimum
        total -= sizes.pop()
        deficit = n - total
        if deficit >= lo:
            sizes.append(deficit)
        else:
            sizes.append(lo)
            over = lo - deficit
            for i in np.argsort(sizes)[::-1]:
                take = min(over, sizes[i] - lo)
                sizes[i] -= take
                over -= take
                if not over:
                    break
            if over:
                raise LfrError("community size bounds are infeasible for n")
    return sizes


# -- matching ------------------------------------------------------------------

def _pair_stubs(stubs, rng, allowed, edges, adj):
    """Configuration-model matching with rejection and swap repair.

    ``allowed(u, v)`` vetoes pairs (e.g. same community for external stubs).
    Accepted edges are added to ``edges``/``adj``; unmatched stubs are
    returned.
    """
    stubs = list(stubs)
    made = []
    for _ in range(MATCH_ROUNDS):
        if len(stubs) < 2:
            break
        order = rng.permutation(len(stubs))
        stubs = [stubs[i] for i in order]
        rejected = []
        for i in range(0, len(stubs) - 1, 2):
            u, v = stubs[i], stubs[i + 1]
            e = (u, v) if u < v else (v, u)
            if u != v and e not in edges and allowed(u, v):
                edges.add(e)
                adj[u].add(v)
                adj[v].add(u)
                made.append(e)
            else:
                rejected.extend((u, v))
        if len(stubs) % 2:
            rejected.append(stubs[-1])
        if len(rejected) == len(stubs):
            stubs = rejected
            break
        stubs = rejected
    # swap repair: splice a rejected pair into an accepted edge
    leftover = []
    i = 0
    while i + 1 < len(stubs):
        u, v = stubs[i], stubs[i + 1]
        done = False
        if len(made) <= 400:
            candidates = rng.permutation(len(made))
        else:
            candidates = rng.integers(len(made), size=400)
        for j in candidates:
            j = int(j)
            x, y = made[j]
            if rng.random() < 0.5:
                x, y = y, x
            if u == x or v == y:
                continue
            e1 = (u, x) if u < x else (x, u)
            e2 = (v, y) if v < y else (y, v)
            if e1 == e2 or e1 in edges or e2 in edges:
                continue
            if not (allowed(u, x) and allowed(v, y)):
                continue
            old = made[j]
            edges.discard(old)
            adj[old[0]].discard(old[1])
            adj[old[1]].discard(old[0])
            for a, b in (e1, e2):
                edges.add((a, b))
                adj[a].add(b)
                adj[b].add(a)
            made[j] = e1
            made.append(e2)
            done = True
            break
        if not done:
            leftover.extend((u, v))
        i += 2
    if len(stubs) % 2:
        leftover.append(stubs[-1])
    return leftover


# -- mixing-parameter rewiring ---------------------------------------------------

class _EdgePool:
    """Indexable edge list with O(1) removal."""

    def __init__(self, edges=()):
        self.items = []
        self.pos = {}
        for e in edges:
            self.add(e)

    def add(self, e):
        self.pos[e] = len(self.items)
        self.items.append(e)

    def remove(self, e):
        i = self.pos.pop(e)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def sample(self, rng):
        return self.items[int(rng.integers(len(self.items)))]

    def __len__(self):
        return len(self.items)


def _rewire_mixing(edges, adj, comm, members, mu, rng):
    m = len(edges)
    if m == 0:
        return 0
    intra = _EdgePool(e for e in sorted(edges) if comm[e[0]] == comm[e[1]])
    inter = _EdgePool(e for e in sorted(edges) if comm[e[0]] != comm[e[1]])
    target = int(round(mu * m))

    def key(a, b):
        return (a, b) if a < b else (b, a)

    def n_inter(pairs):
        return sum(comm[a] != comm[b] for a, b in pairs)

    def apply(old, new):
        for a, b in old:
            edges.discard((a, b))
            adj[a].discard(b)
            adj[b].discard(a)
            (intra if comm[a] == comm[b] else inter).remove((a, b))
        for a, b in new:
            edges.add((a, b))
            adj[a].add(b)
            adj[b].add(a)
            (intra if comm[a] == comm[b] else inter).add((a, b))

    attempts = 0
    budget = REWIRE_BUDGET * m
    while len(inter) != target and attempts < budget:
        attempts += 1
        gap = target - len(inter)
        if gap > 0:
            if len(intra) < 1:
                break
            e1 = intra.sample(rng)
            e2 = inter.sample(rng) if (gap == 1 and len(inter) and rng.random() < 0.5) \
                else intra.sample(rng)
        else:
            if len(inter) < 1:
                break
            e1 = inter.sample(rng)
            a = e1[0] if rng.random() < 0.5 else e1[1]
            c = members[comm[a]][int(rng.integers(len(members[comm[a]])))]
            outside = [d for d in adj[c] if comm[d] != comm[c]]
            if not outside:
                continue
            e2 = key(c, outside[int(rng.integers(len(outside)))])
        if e1 == e2:
            continue
        a, b = e1
        c, d = e2
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4:
            continue
        new = [key(a, c), key(b, d)]
        if new[0] in edges or new[1] in edges:
            continue
        delta = n_inter(new) - n_inter([e1, e2])
        if abs(gap - delta) < abs(gap):
            apply([e1, e2], new)
    return attempts


# -- generator ---------------------------------------------------------------------

@dataclass
class LfrResult:
    graph: Graph
    partition: Partition
    target_degree: np.ndarray
    restarts: int
    rewire_attempts: int

    def provenance(self, params: LfrParams) -> dict:
        from .partition import mixing_parameter

        g = self.graph
        return {
            "params": params.as_dict(),
            "realized_mu": mixing_parameter(g, self.partition) if g.m else None,
            "mean_degree": float(g.degree.mean()),
            "communities": self.partition.count,
            "edges": g.m,
            "restarts": self.restarts,
        }


def _place_nodes(k_in, sizes, rng):
    """Community per node; high internal degree first, drawn among
    communities that can hold it, weighted by free capacity."""
    n = len(k_in)
    sizes = np.asarray(sizes)
    free = sizes.copy()
    comm = np.empty(n, dtype=np.int64)
    capped = {}
    # random order among equal internal degrees
    perm = rng.permutation(n)
    order = perm[np.argsort(-k_in[perm], kind="stable")]
    for v in order:
        ok = np.flatnonzero((free > 0) & (sizes > k_in[v]))
        if len(ok):
            w = free[ok].astype(np.float64)
            c = int(ok[rng.choice(len(ok), p=w / w.sum())])
        else:
            spare = np.flatnonzero(free > 0)
            c = int(spare[np.argmax(sizes[spare])])
            capped[int(v)] = int(k_in[v] - (sizes[c] - 1))
        comm[v] = c
        free[c] -= 1
    return comm, capped


def generate_detailed(params: LfrParams) -> LfrResult:
    rng = np.random.default_rng(params.seed)
    deg = sample_powerlaw_degrees(params, rng)
    n = params.n
    last = {}
    for restart in range(MAX_RESTARTS):
        sizes = sample_community_sizes(params, rng)
        k_in = np.floor((1.0 - params.mu) * deg + 0.5).astype(np.int64)  # ties to internal
        k_in = np.minimum(k_in, deg)
        comm, capped = _place_nodes(k_in, sizes, rng)
        moved = sum(capped.values())
        if moved <= MAX_CAPPED_STUB_SHARE * deg.sum():
            break
        last = {"restart": restart, "capped_nodes": len(capped), "moved_stubs": moved,
                "max_size": int(max(sizes)), "max_internal": int(k_in.max())}
    else:
        raise LfrError("internal-degree constraints unsatisfiable after "
                       f"{MAX_RESTARTS} restarts", last)
    sampled = deg.copy()
    k_out = deg - k_in
    size_of = np.asarray(sizes)[comm]
    # a capped node sheds a little of its overflow; the rest becomes inter-community
    deficit = 0
    for v, extra in capped.items():
        shed = min(extra, MAX_SHED)
        k_in[v] -= extra
        k_out[v] += extra - shed
        deficit += extra - shed
    # offset it by turning external stubs of other nodes internal, degrees unchanged
    fixed = np.fromiter(capped, dtype=np.int64, count=len(capped))
    for _ in range(COMPENSATION_PASSES):
        if not deficit:
            break
        room = np.flatnonzero((k_out > 0) & (k_in + 1 < size_of))
        room = np.setdiff1d(room, fixed)
        if not len(room):
            break
        take = rng.choice(room, size=min(deficit, len(room)), replace=False)
        k_in[take] += 1
        k_out[take] -= 1
        deficit -= len(take)
    deg = k_in + k_out
    members = [[] for _ in range(len(sizes))]
    for v in range(n):
        members[comm[v]].append(v)

    # each community needs an even number of internal stubs
    for c, mem in enumerate(members):
        if k_in[mem].sum() % 2:
            v = mem[int(np.argmax(k_in[mem]))]
            k_in[v] -= 1
            k_out[v] += 1

    edges: set = set()
    adj = [set() for _ in range(n)]
    spill = []
    for c, mem in enumerate(members):
        stubs = [v for v in mem for _ in range(k_in[v])]
        spill.extend(_pair_stubs(stubs, rng, lambda u, v: True, edges, adj))
    ext = [v for v in range(n) for _ in range(k_out[v])] + spill
    if len(ext) % 2:
        ext.pop(int(rng.integers(len(ext))))
    _pair_stubs(ext, rng, lambda u, v: comm[u] != comm[v], edges, adj)

    attempts = _rewire_mixing(edges, adj, comm, members, params.mu, rng)
    g = Graph(n, sorted(edges))
    return LfrResult(g, Partition(comm.tolist()), sampled, restart, attempts)


def generate(params: LfrParams) -> tuple[Graph, Partition]:
    res = generate_detailed(params)
    return res.graph, res.partition
