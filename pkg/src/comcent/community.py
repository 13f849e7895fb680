"""Community-aware centrality measures.

Twenty-eight vectors in total: the local and global components of the ten
classical measures, the neighbouring-community count, bridging centrality,
and six mixed measures that combine intra- and inter-community links.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import sparse

from . import centrality as cl
from .centrality import CentralityParams, CentralityVector, DEFAULT_PARAMS
from .graph import Graph
from .kcore import core_number
from .partition import Partition, PartitionError

LOCAL = "L"
GLOBAL = "G"


@dataclass(frozen=True)
class MixedParams:
    kshell_alpha: float = 0.5
    comm_R: float = 100.0
    entropy_base: str = "e"

    def __post_init__(self):
        if not 0.0 <= self.kshell_alpha <= 1.0:
            raise ValueError("kshell_alpha must lie in [0, 1]")
        if not self.comm_R > 0:
            raise ValueError("comm_R must be positive")
        if self.entropy_base != "e":
            raise ValueError("only the natural-log entropy is supported")

    def as_dict(self):
        return asdict(self)


DEFAULT_MIXED = MixedParams()


@dataclass(frozen=True)
class ModularSplit:
    """Intra-community edges on the full node set, and the inter-community
    edges on just their endpoints (``global_nodes`` maps back to parent)."""

    local_graph: Graph
    global_graph: Graph
    global_nodes: np.ndarray


@dataclass(frozen=True)
class NodeCommunityProfile:
    k_in: np.ndarray
    k_out: np.ndarray
    k_by_community: sparse.csr_matrix  # n x C counts k_{i,c}


def _check(g: Graph, p: Partition):
    if p.n != g.n:
        raise PartitionError(f"partition covers {p.n} nodes, graph has {g.n}")


def modular_split(g: Graph, p: Partition) -> ModularSplit:
    _check(g, p)
    c = p.community_of
    intra, inter = [], []
    for u, v in g.edges:
        (intra if c[u] == c[v] else inter).append((u, v))
    local = Graph(g.n, intra, g.labels)
    nodes = np.array(sorted({x for e in inter for x in e}), dtype=np.int64)
    pos = {int(v): i for i, v in enumerate(nodes)}
    glob = Graph(len(nodes), [(pos[u], pos[v]) for u, v in inter],
                 [g.labels[int(v)] for v in nodes])
    return ModularSplit(local, glob, nodes)


def community_profile(g: Graph, p: Partition) -> NodeCommunityProfile:
    _check(g, p)
    member = sparse.csr_matrix(
        (np.ones(g.n), (np.arange(g.n), p.community_of)), shape=(g.n, p.count))
    by_comm = (g.to_csr() @ member).tocsr()
    by_comm.eliminate_zeros()
    own = np.asarray(by_comm[np.arange(g.n), p.community_of]).ravel()
    k_in = own.astype(np.int64)
    k_out = g.degree - k_in
    return NodeCommunityProfile(k_in, k_out, by_comm)


def _side_graph(split: ModularSplit, side: str) -> Graph:
    if side == LOCAL:
        return split.local_graph
    if side == GLOBAL:
        return split.global_graph
    raise ValueError(f"side must be {LOCAL!r} or {GLOBAL!r}")


def modular_component(g: Graph, p: Partition, measure: str, side: str,
                      params: CentralityParams = DEFAULT_PARAMS,
                      split: ModularSplit | None = None) -> CentralityVector:
    """One side of a classical measure's modular decomposition.

    The measure runs on the local or global graph and the scores are laid
    out over the parent's node indices; nodes missing from the global graph
    score 0.  A side with no edges at all scores 0 everywhere.
    """
    if split is None:
        split = modular_split(g, p)
    sub = _side_graph(split, side)
    out = np.zeros(g.n)
    meta = {}
    if sub.m > 0:
        vec = cl.classical(sub, measure, params)
        meta = dict(vec.params)
        if side == LOCAL:
            out[:] = vec.scores
        else:
            out[split.global_nodes] = vec.scores
    return CentralityVector(f"{measure}_{side}", out, meta)


def nnc(g: Graph, p: Partition) -> CentralityVector:
    """Number of distinct foreign communities among a node's neighbours."""
    prof = community_profile(g, p)
    counts = np.diff(prof.k_by_community.indptr)
    own_present = prof.k_in > 0
    return CentralityVector("nnc", (counts - own_present).astype(np.float64))


def bridging(g: Graph, betweenness: np.ndarray | None = None) -> CentralityVector:
    """Betweenness times the bridging coefficient
    ``(1/k_i) / sum_{j in N(i)} 1/k_j``."""
    if betweenness is None:
        betweenness = cl.brandes_dependencies(g)
    k = g.degree.astype(np.float64)
    inv = cl._safe_div(1.0, k)
    coef = cl._safe_div(inv, cl._neighbor_sum(g, inv))
    return CentralityVector("bridging", np.asarray(betweenness) * coef)


def comm_centrality(g: Graph, p: Partition, params: MixedParams = DEFAULT_MIXED) -> CentralityVector:
    prof = community_profile(g, p)
    c = p.community_of
    C = p.count
    k_in = prof.k_in.astype(np.float64)
    k_out = prof.k_out.astype(np.float64)
    # edges incident to each community: internal ones once, external ones
    # once for each community they touch
    internal = np.bincount(c, weights=k_in, minlength=C) / 2.0
    external = np.bincount(c, weights=k_out, minlength=C)
    mu_c = cl._safe_div(external, internal + external)
    max_in = np.zeros(C)
    max_out = np.zeros(C)
    np.maximum.at(max_in, c, k_in)
    np.maximum.at(max_out, c, k_out)
    R = params.comm_R
    chi = cl._safe_div(k_in, max_in[c]) * R
    chi_b = cl._safe_div(k_out, max_out[c]) * R
    mu = mu_c[c]
    return CentralityVector("comm", (1 + mu) * chi + (1 - mu) * chi_b ** 2, {"comm_R": R})


def community_hub_bridge(g: Graph, p: Partition) -> CentralityVector:
    prof = community_profile(g, p)
    n_c = p.sizes[p.community_of]
    scores = n_c * prof.k_in + nnc(g, p).scores * prof.k_out
    return CentralityVector("chb", scores)


def community_based_centrality(g: Graph, p: Partition) -> CentralityVector:
    prof = community_profile(g, p)
    weights = p.sizes / g.n if g.n else p.sizes.astype(float)
    return CentralityVector("cbc", prof.k_by_community @ weights)


def participation_coefficient(g: Graph, p: Partition) -> CentralityVector:
    prof = community_profile(g, p)
    k = g.degree.astype(np.float64)
    sq = np.asarray(prof.k_by_community.multiply(prof.k_by_community).sum(axis=1)).ravel()
    scores = np.where(k > 0, 1.0 - cl._safe_div(sq, k ** 2), 0.0)
    return CentralityVector("pc", scores)


def kshell_with_community(g: Graph, p: Partition, params: MixedParams = DEFAULT_MIXED,
                          split: ModularSplit | None = None) -> CentralityVector:
    if split is None:
        split = modular_split(g, p)
    ks_local = core_number(split.local_graph).astype(np.float64)
    ks_global = np.zeros(g.n)
    ks_global[split.global_nodes] = core_number(split.global_graph)
    a = params.kshell_alpha
    return CentralityVector("ksc", a * ks_local + (1 - a) * ks_global, {"kshell_alpha": a})


def community_based_mediator(g: Graph, p: Partition) -> CentralityVector:
    prof = community_profile(g, p)
    k = g.degree.astype(np.float64)
    total = k.sum()
    h = np.zeros(g.n)
    for part in (prof.k_in, prof.k_out):
        rho = cl._safe_div(part, k)
        pos = rho > 0
        h[pos] -= rho[pos] * np.log(rho[pos])
    scores = h * (k / total) if total > 0 else np.zeros(g.n)
    return CentralityVector("cbm", scores, {"entropy_base": "e"})


# -- column registry -------------------------------------------------------

LOCAL_IDS = tuple(f"{m}_L" for m in cl.CLASSICAL_IDS)
GLOBAL_IDS = tuple(f"{m}_G" for m in cl.CLASSICAL_IDS) + ("nnc", "bridging")
MIXED_IDS = ("comm", "chb", "cbc", "pc", "ksc", "cbm")
COMMUNITY_IDS = LOCAL_IDS + GLOBAL_IDS + MIXED_IDS

BLOCKS = {"local": LOCAL_IDS, "global": GLOBAL_IDS, "mixed": MIXED_IDS}


def all_community_aware(g: Graph, p: Partition,
                        params: CentralityParams = DEFAULT_PARAMS,
                        mixed: MixedParams = DEFAULT_MIXED,
                        betweenness: np.ndarray | None = None) -> dict[str, CentralityVector]:
    split = modular_split(g, p)
    out = {}
    for mid in cl.CLASSICAL_IDS:
        out[f"{mid}_L"] = modular_component(g, p, mid, LOCAL, params, split)
    for mid in cl.CLASSICAL_IDS:
        out[f"{mid}_G"] = modular_component(g, p, mid, GLOBAL, params, split)
    out["nnc"] = nnc(g, p)
    out["bridging"] = bridging(g, betweenness)
    out["comm"] = comm_centrality(g, p, mixed)
    out["chb"] = community_hub_bridge(g, p)
    out["cbc"] = community_based_centrality(g, p)
    out["pc"] = participation_coefficient(g, p)
    out["ksc"] = kshell_with_community(g, p, mixed, split)
    out["cbm"] = community_based_mediator(g, p)
    return out


def community_measure(g: Graph, p: Partition, mid: str,
                      params: CentralityParams = DEFAULT_PARAMS,
                      mixed: MixedParams = DEFAULT_MIXED) -> CentralityVector:
    if mid.endswith("_L") or mid.endswith("_G"):
        base, side = mid.rsplit("_", 1)
        return modular_component(g, p, base, side, params)
    fns = {
        "nnc": lambda: nnc(g, p),
        "bridging": lambda: bridging(g),
        "comm": lambda: comm_centrality(g, p, mixed),
        "chb": lambda: community_hub_bridge(g, p),
        "cbc": lambda: community_based_centrality(g, p),
        "pc": lambda: participation_coefficient(g, p),
        "ksc": lambda: kshell_with_community(g, p, mixed),
        "cbm": lambda: community_based_mediator(g, p),
    }
    if mid not in fns:
        raise KeyError(f"unknown community-aware measure {mid!r}")
    return fns[mid]()
