"""Macroscopic and mesoscopic topological features of a network."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, all_pairs_distances, giant_component, induced_subgraph
from .partition import Partition, mixing_parameter, modularity
from .powerlaw import PowerLawError, fit_powerlaw

UNDEFINED = math.nan

MACRO = ("density", "transitivity", "assortativity", "avg_distance", "diameter",
         "efficiency", "gamma_pred")
MESO = ("mixing_parameter", "modularity", "internal_distance", "internal_density",
        "max_odf", "avg_odf", "flake_odf", "embeddedness", "hub_dominance")
FEATURE_NAMES = MACRO + MESO


@dataclass
class TopoFeatures:
    density: float = UNDEFINED
    transitivity: float = UNDEFINED
    assortativity: float = UNDEFINED
    avg_distance: float = UNDEFINED
    diameter: float = UNDEFINED
    efficiency: float = UNDEFINED
    gamma_pred: float = UNDEFINED
    mixing_parameter: float = UNDEFINED
    modularity: float = UNDEFINED
    internal_distance: float = UNDEFINED
    internal_density: float = UNDEFINED
    max_odf: float = UNDEFINED
    avg_odf: float = UNDEFINED
    flake_odf: float = UNDEFINED
    embeddedness: float = UNDEFINED
    hub_dominance: float = UNDEFINED
    ks_pass: bool = False

    def as_dict(self):
        return asdict(self)

    def update(self, values: dict):
        for k, v in values.items():
            setattr(self, k, v)
        return self


def _triangles(g: Graph) -> np.ndarray:
    a = g.to_csr()
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0


def transitivity(g: Graph) -> float:
    k = g.degree.astype(np.float64)
    triples = float(np.sum(k * (k - 1) / 2.0))
    if triples == 0:
        return 0.0
    return float(_triangles(g).sum() / triples)


def degree_assortativity(g: Graph) -> float:
    if g.m == 0:
        return UNDEFINED
    e = np.asarray(g.edges)
    k = g.degree.astype(np.float64)
    x = np.concatenate([k[e[:, 0]], k[e[:, 1]]])
    y = np.concatenate([k[e[:, 1]], k[e[:, 0]]])
    if np.std(x) == 0:
        return UNDEFINED
    return float(np.corrcoef(x, y)[0, 1])


def _distance_summary(g: Graph):
    """Mean distance and diameter on the giant component."""
    gc, _ = giant_component(g)
    if gc.n < 2:
        return 0.0, 0.0
    d = all_pairs_distances(gc)
    off = ~np.eye(gc.n, dtype=bool)
    return float(d[off].mean()), float(d.max())


def efficiency(g: Graph, dist: np.ndarray | None = None) -> float:
    n = g.n
    if n < 2:
        return 0.0
    d = all_pairs_distances(g) if dist is None else dist
    inv = np.zeros(d.shape)
    ok = d > 0
    inv[ok] = 1.0 / d[ok]
    return float(inv.sum() / (n * (n - 1)))


def macro_features(g: Graph, fit_seed: int = 0, bootstrap_reps: int = 100) -> dict:
    n = g.n
    if n < 2:
        raise ValueError("macro features need at least two nodes")
    avg_d, diam = _distance_summary(g)
    try:
        fit = fit_powerlaw(g.degree, seed=fit_seed, reps=bootstrap_reps)
        gamma, ks_pass = fit.alpha, bool(fit.ks_pass)
    except PowerLawError:
        gamma, ks_pass = UNDEFINED, False
    return {
        "density": 2.0 * g.m / (n * (n - 1)),
        "transitivity": transitivity(g),
        "assortativity": degree_assortativity(g),
        "avg_distance": avg_d,
        "diameter": diam,
        "efficiency": efficiency(g),
        "gamma_pred": gamma,
        "ks_pass": ks_pass,
    }


def _mean_pair_distance(sub: Graph) -> float:
    if sub.n < 2:
        return 0.0
    d = all_pairs_distances(sub)
    ok = d > 0
    return float(d[ok].mean()) if ok.any() else 0.0


def meso_features(g: Graph, p: Partition) -> dict:
    """Community-level features, each averaged over communities without
    weighting (embeddedness is a node average)."""
    from .community import community_profile

    prof = community_profile(g, p)
    k = g.degree.astype(np.float64)
    k_in = prof.k_in.astype(np.float64)
    k_out = prof.k_out.astype(np.float64)
    has_deg = k > 0
    odf = np.zeros(g.n)
    odf[has_deg] = k_out[has_deg] / k[has_deg]
    e = np.asarray(g.edges) if g.m else np.zeros((0, 2), dtype=np.int64)
    c = p.community_of
    intra = np.bincount(c[e[:, 0]][c[e[:, 0]] == c[e[:, 1]]], minlength=p.count) if g.m \
        else np.zeros(p.count)

    dens, dist, mx, avg, flake, hub = [], [], [], [], [], []
    for ci, members in enumerate(p.communities):
        mem = np.asarray(members)
        nc = len(mem)
        dens.append(2.0 * intra[ci] / (nc * (nc - 1)) if nc > 1 else 0.0)
        sub, _ = induced_subgraph(g, mem)
        dist.append(_mean_pair_distance(sub))
        o = odf[mem]
        mx.append(float(o.max()))
        avg.append(float(o.mean()))
        flake.append(float(np.mean(k_in[mem] < k[mem] / 2.0)))
        hub.append(float(k_in[mem].max() / (nc - 1)) if nc > 1 else 0.0)
    emb = float(np.mean(k_in[has_deg] / k[has_deg])) if has_deg.any() else UNDEFINED
    out = {
        "mixing_parameter": mixing_parameter(g, p) if g.m else UNDEFINED,
        "modularity": modularity(g, p) if g.m else UNDEFINED,
        "internal_distance": float(np.mean(dist)),
        "internal_density": float(np.mean(dens)),
        "max_odf": float(np.mean(mx)),
        "avg_odf": float(np.mean(avg)),
        "flake_odf": float(np.mean(flake)),
        "embeddedness": emb,
        "hub_dominance": float(np.mean(hub)),
    }
    return out


def topo_features(g: Graph, p: Partition, fit_seed: int = 0,
                  bootstrap_reps: int = 100) -> TopoFeatures:
    return TopoFeatures().update(macro_features(g, fit_seed, bootstrap_reps)).update(
        meso_features(g, p))

