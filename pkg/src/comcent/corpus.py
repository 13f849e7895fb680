"""Network corpora for the regression study: LFR sweeps plus bundled data."""

from __future__ import annotations

import math
from importlib import resources

import numpy as np

from . import analysis as an
from . import centrality as cl
from . import community as cm
from .graph import Graph, load_edge_list
from .lfr import LfrParams, generate
from .netstats import topo_features
from .partition import Partition, louvain

BUNDLED = ("karate", "les_miserables", "florentine_families", "davis_southern_women", "painters")


def bundled_graph(name: str) -> Graph:
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled network {name!r}; choose from {', '.join(BUNDLED)}")
    text = resources.files("comcent").joinpath("data").joinpath(f"{name}.edges").read_text("utf-8")
    return load_edge_list(text)


def bundled_networks(seed: int = 0):
    """Bundled graphs with their Louvain partitions."""
    for name in BUNDLED:
        g = bundled_graph(name)
        yield name, g, louvain(g, seed=seed)


def lfr_sweep(count: int = 20, n: int = 500, mu_lo: float = 0.05, mu_hi: float = 0.7,
              seed: int = 0, **kw):
    """``count`` LFR graphs with mu evenly spaced over [mu_lo, mu_hi]."""
    for i, mu in enumerate(np.linspace(mu_lo, mu_hi, count)):
        params = LfrParams(n=n, mu=round(float(mu), 6), seed=seed + i, **kw)
        g, p = generate(params)
        yield f"lfr_{i:03d}_mu{params.mu:g}", g, p


def safe_block_means(m: an.CorrelationMatrix, absolute: bool = False) -> dict:
    out = {}
    for name, key in (("local", "mean_local"), ("global", "mean_global"), ("mixed", "mean_mixed")):
        vals = m.block(name).ravel()
        vals = vals[~np.isnan(vals)]
        if absolute:
            vals = np.abs(vals)
        out[key] = float(vals.mean()) if len(vals) else math.nan
    return out


def network_record(name: str, g: Graph, p: Partition,
                   params: cl.CentralityParams = cl.DEFAULT_PARAMS,
                   mixed: cm.MixedParams = cm.DEFAULT_MIXED,
                   absolute: bool = False, fit_seed: int = 0,
                   bootstrap_reps: int = 100, threads: int = 1) -> dict:
    """One corpus row: topological features plus heatmap block means."""
    row = {"network": name}
    row.update(topo_features(g, p, fit_seed, bootstrap_reps).as_dict())
    row.update(safe_block_means(an.heatmap(g, p, params, mixed, threads), absolute))
    return row
