"""Command-line interface.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from . import analysis as an
from . import centrality as cl
from . import community as cm
from . import corpus as co
from . import tables as tb
from .graph import giant_component, read_edge_list, write_edge_list
from .lfr import LfrError, LfrParams, generate_detailed
from .partition import (Partition, classify_strength, louvain, mixing_parameter, modularity,
                        read_partition, write_partition)

log = logging.getLogger("comcent")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Invalid parameter values (exit 2)."""


# -- helpers ---------------------------------------------------------------------

def _clean(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    if isinstance(v, (np.floating,)):
        return _clean(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _ensure_dir(path):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    return d


def write_provenance(output, args, extra=None):
    """Sidecar ``<output stem>.provenance.json`` next to the output."""
    _ensure_dir(output)
    stem = os.path.splitext(output)[0]
    argd = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    doc = {"tool": "comcent", "version": __version__, "command": args.command,
           "args": argd, "outputs": [os.path.basename(output)]}
    if extra:
        doc.update(extra)
    path = stem + ".provenance.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_clean(doc), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def _centrality_params(args) -> cl.CentralityParams:
    try:
        return cl.CentralityParams(katz_fraction=args.katz_fraction,
                                   pagerank_damping=args.pagerank_damping,
                                   diffusion_lambda=args.diffusion_lambda)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _mixed_params(args) -> cm.MixedParams:
    try:
        return cm.MixedParams(kshell_alpha=args.kshell_alpha, comm_R=args.comm_r)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _threads(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return args.threads


def _giant(g, p=None, wanted=False):
    """Optionally restrict to the largest connected component."""
    if not wanted:
        return g, p
    gc, keep = giant_component(g)
    if gc.n < g.n:
        log.info("giant component keeps %d of %d nodes", gc.n, g.n)
    return gc, (Partition(p.community_of[keep].tolist()) if p is not None else None)


def _load_graph_partition(args):
    g = read_edge_list(args.graph)
    p = read_partition(args.partition, g)
    return _giant(g, p, args.giant_component)


def _measure_params(args):
    return {"centrality": _centrality_params(args).as_dict(),
            "mixed": _mixed_params(args).as_dict()}


# -- commands -----------------------------------------------------------------------

def cmd_generate(args):
    try:
        params = LfrParams(n=args.n, avg_degree=args.avg_degree, max_degree=args.max_degree,
                           gamma=args.gamma, theta=args.theta, mu=args.mu,
                           min_community=args.min_community,
                           max_community=args.max_community, seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from e
    os.makedirs(args.out_dir, exist_ok=True)
    res = generate_detailed(params)
    edges = os.path.join(args.out_dir, f"{args.prefix}.edges")
    cmty = os.path.join(args.out_dir, f"{args.prefix}.cmty")
    write_edge_list(res.graph, edges)
    write_partition(res.graph, res.partition, cmty)
    prov = res.provenance(params)
    write_provenance(edges, args, {"outputs": [os.path.basename(edges), os.path.basename(cmty)],
                                   "lfr": prov})
    print(f"realized mu={prov['realized_mu']:.4f} edges={res.graph.m} "
          f"communities={res.partition.count}")


def cmd_communities(args):
    g = read_edge_list(args.graph)
    if g.m == 0:
        raise ValueError("graph has no edges")
    if args.external:
        g, p = _giant(g, read_partition(args.external, g), args.giant_component)
        source = "external"
    else:
        g, _ = _giant(g, None, args.giant_component)
        p = louvain(g, seed=args.seed)
        source = "louvain"
    _ensure_dir(args.output)
    write_partition(g, p, args.output)
    mu = mixing_parameter(g, p)
    stats = {"source": source, "mixing_parameter": mu, "modularity": modularity(g, p),
             "communities": p.count, "strength": classify_strength(mu).strength.value}
    write_provenance(args.output, args, {"partition": stats})
    print(f"mu={mu:.4f} Q={stats['modularity']:.4f} C={p.count}")


def cmd_centrality(args):
    g, p = _load_graph_partition(args)
    params = _centrality_params(args)
    mixed = _mixed_params(args)
    classical, aware = an.measure_vectors(g, p, params, mixed, _threads(args))
    vectors = dict(classical)
    vectors.update(aware)
    _ensure_dir(args.output)
    tb.write_text(args.output, tb.format_centrality(g, vectors))
    write_provenance(args.output, args, _measure_params(args))


def cmd_heatmap(args):
    g, p = _load_graph_partition(args)
    m = an.heatmap(g, p, _centrality_params(args), _mixed_params(args), _threads(args))
    _ensure_dir(args.output)
    tb.write_text(args.output, tb.format_heatmap(m))
    means = co.safe_block_means(m, args.abs_means)
    write_provenance(args.output, args, {**_measure_params(args), "block_means": means,
                                         "mean_mode": "absolute" if args.abs_means else "signed"})


def _blocks(choice):
    return ("local", "global", "mixed") if choice == "all" else (choice,)


def cmd_histogram(args):
    if not args.bin_width > 0:
        raise UsageError("--bin-width must be positive")
    m = tb.parse_heatmap(args.heatmap)
    parts, modal = [], {}
    for block in _blocks(args.block):
        h = an.histogram(m.block(block).ravel(), args.bin_width)
        text = tb.format_histogram(h, block)
        parts.append(text if not parts else text.split("\n", 1)[1])
        modal[block] = list(h.modal_class)
    _ensure_dir(args.output)
    tb.write_text(args.output, "".join(parts))
    write_provenance(args.output, args, {"modal_class": modal})


def cmd_corrnet(args):
    if not -1.0 < args.threshold < 1.0:
        raise UsageError("--threshold must lie in (-1, 1)")
    m = tb.parse_heatmap(args.heatmap)
    edges = an.threshold_network(m, args.threshold)
    _ensure_dir(args.output)
    tb.write_text(args.output, tb.format_corr_edges(edges))
    write_provenance(args.output, args, {"edges": len(edges)})


def cmd_features(args):
    g, p = _load_graph_partition(args)
    from .netstats import topo_features
    feats = topo_features(g, p, args.seed, args.bootstrap_reps).as_dict()
    feats["network"] = args.name or os.path.splitext(os.path.basename(args.graph))[0]
    _ensure_dir(args.output)
    tb.write_text(args.output, tb.format_features([feats]))
    write_provenance(args.output, args, {"aggregation": "unweighted mean over communities"})


def cmd_corpus(args):
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    try:
        LfrParams(n=args.n, mu=args.mu_min)
        LfrParams(n=args.n, mu=args.mu_max)
    except ValueError as e:
        raise UsageError(str(e)) from e
    params, mixed, threads = _centrality_params(args), _mixed_params(args), _threads(args)
    nets = list(co.lfr_sweep(args.count, args.n, args.mu_min, args.mu_max, args.seed)) \
        if args.count else []
    if not args.no_bundled:
        nets += list(co.bundled_networks(args.seed))
    rows = []
    for name, g, p in nets:
        log.info("corpus: %s", name)
        rows.append(co.network_record(name, g, p, params, mixed, args.abs_means,
                                      args.seed, args.bootstrap_reps, threads))
    _ensure_dir(args.output)
    tb.write_text(args.output, tb.format_features(rows, tb.CORPUS_EXTRA))
    write_provenance(args.output, args, {**_measure_params(args), "networks": len(rows),
                                         "mean_mode": "absolute" if args.abs_means else "signed"})


def cmd_regress(args):
    rows = tb.parse_corpus(args.corpus)
    est = {"ols": ("OLS",), "wls": ("WLS",), "both": ("OLS", "WLS")}[args.estimator]
    if args.abs_means:
        for r in rows:
            for k in ("mean_local", "mean_global"):
                if r[k] != "":
                    r[k] = str(abs(float(r[k])))
    results = an.regression_suite(rows, est)
    _ensure_dir(args.output)
    tb.write_text(args.output, tb.format_regression(results))
    write_provenance(args.output, args, {"rows": len(results)})


PIPELINE_KEYS = {"n", "mu", "seeds", "gamma", "theta", "avg_degree", "max_degree",
                 "min_community", "max_community", "bin_width"}


def cmd_pipeline(args):
    """LFR grid -> heatmaps -> averaged heatmap, histograms and block means per mu."""
    cfg = {"n": 1000, "mu": [0.05, 0.25, 0.7], "seeds": [0, 1, 2], "gamma": 2.7,
           "theta": 2.7, "avg_degree": 8.0, "max_degree": 27, "min_community": 4,
           "max_community": 250, "bin_width": 0.05}
    if args.grid:
        with open(args.grid, encoding="utf-8") as f:
            user = json.load(f)
        unknown = sorted(set(user) - PIPELINE_KEYS)
        if unknown:
            raise UsageError(f"unknown pipeline keys: {', '.join(unknown)}")
        cfg.update(user)
    params, mixed, threads = _centrality_params(args), _mixed_params(args), _threads(args)
    try:
        grid = [[LfrParams(n=cfg["n"], avg_degree=cfg["avg_degree"], max_degree=cfg["max_degree"],
                           gamma=cfg["gamma"], theta=cfg["theta"], mu=float(mu),
                           min_community=cfg["min_community"],
                           max_community=cfg["max_community"], seed=int(s))
                 for s in cfg["seeds"]] for mu in cfg["mu"]]
    except (ValueError, TypeError) as e:
        raise UsageError(str(e)) from e
    os.makedirs(args.out_dir, exist_ok=True)
    summary = []
    for row in grid:
        mu = row[0].mu
        mats = []
        for lp in row:
            res = generate_detailed(lp)
            mats.append(an.heatmap(res.graph, res.partition, params, mixed, threads))
        m = an.mean_heatmap(mats)
        tag = f"mu{mu:g}"
        tb.write_text(os.path.join(args.out_dir, f"heatmap_{tag}.csv"), tb.format_heatmap(m))
        parts = []
        for block in ("local", "global", "mixed"):
            h = an.histogram(m.block(block).ravel(), cfg["bin_width"])
            text = tb.format_histogram(h, block)
            parts.append(text if not parts else text.split("\n", 1)[1])
        tb.write_text(os.path.join(args.out_dir, f"histogram_{tag}.csv"), "".join(parts))
        means = co.safe_block_means(m, args.abs_means)
        summary.append([tb.fmt(mu), tb.fmt(means["mean_local"]), tb.fmt(means["mean_global"]),
                        tb.fmt(means["mean_mixed"])])
    out = os.path.join(args.out_dir, "block_means.csv")
    tb.write_text(out, tb._render(["mu", "mean_local", "mean_global", "mean_mixed"], summary))
    write_provenance(out, args, {"grid": cfg, **_measure_params(args),
                                 "mean_mode": "absolute" if args.abs_means else "signed"})


# -- parser ---------------------------------------------------------------------------

def _measure_flags(p):
    d = cl.DEFAULT_PARAMS
    p.add_argument("--katz-fraction", type=float, default=d.katz_fraction,
                   help="Katz attenuation as a fraction of 1/lambda_max")
    p.add_argument("--pagerank-damping", type=float, default=d.pagerank_damping)
    p.add_argument("--diffusion-lambda", type=float, default=d.diffusion_lambda)
    m = cm.DEFAULT_MIXED
    p.add_argument("--kshell-alpha", type=float, default=m.kshell_alpha)
    p.add_argument("--comm-r", type=float, default=m.comm_R, help="Comm centrality scale R")
    p.add_argument("--threads", type=int, default=1, help="worker cap (outputs unchanged)")


def _giant_flag(p):
    p.add_argument("--giant-component", action="store_true",
                   help="keep only the largest connected component (off by default)")


def _gp(p):
    p.add_argument("-g", "--graph", required=True, help="edge list")
    p.add_argument("-p", "--partition", required=True, help="partition file")
    _giant_flag(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="comcent", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"comcent {__version__}")
    ap.add_argument("--config", help="JSON file whose keys mirror the subcommand's flags")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="LFR benchmark graph")
    d = LfrParams()
    p.add_argument("--n", type=int, default=d.n)
    p.add_argument("--avg-degree", type=float, default=d.avg_degree)
    p.add_argument("--max-degree", type=int, default=d.max_degree)
    p.add_argument("--gamma", type=float, default=d.gamma)
    p.add_argument("--theta", type=float, default=d.theta)
    p.add_argument("--mu", type=float, default=d.mu)
    p.add_argument("--min-community", type=int, default=d.min_community)
    p.add_argument("--max-community", type=int, default=d.max_community)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out-dir", default=".")
    p.add_argument("--prefix", default="lfr")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("communities", help="Louvain partition (or ingest an external one)")
    p.add_argument("-g", "--graph", required=True)
    p.add_argument("--partition", dest="external", help="use this partition file instead of Louvain")
    p.add_argument("--seed", type=int, default=0)
    _giant_flag(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("centrality", help="all 38 centrality vectors as CSV")
    _gp(p)
    _measure_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("heatmap", help="10x28 Kendall tau-b matrix")
    _gp(p)
    _measure_flags(p)
    p.add_argument("--abs-means", action="store_true", help="block means of |tau|")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("histogram", help="tau histogram and modal class per block")
    p.add_argument("--heatmap", required=True)
    p.add_argument("--block", choices=("local", "global", "mixed", "all"), default="all")
    p.add_argument("--bin-width", type=float, default=0.05)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("corrnet", help="bipartite network of pairs with tau above a threshold")
    p.add_argument("--heatmap", required=True)
    p.add_argument("--threshold", type=float, default=0.70)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_corrnet)

    p = sub.add_parser("features", help="16 topological features of one network")
    _gp(p)
    p.add_argument("--name", help="network name column (default: file stem)")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.add_argument("--bootstrap-reps", type=int, default=100)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("corpus", help="features and block means over LFR and bundled networks")
    p.add_argument("--count", type=int, default=20, help="LFR networks")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--mu-min", type=float, default=0.05)
    p.add_argument("--mu-max", type=float, default=0.70)
    p.add_argument("--no-bundled", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstrap-reps", type=int, default=100)
    p.add_argument("--abs-means", action="store_true")
    _measure_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("regress", help="OLS/WLS of block means on each feature")
    p.add_argument("--corpus", required=True)
    p.add_argument("--estimator", choices=("ols", "wls", "both"), default="both")
    p.add_argument("--abs-means", action="store_true", help="regress |mean| values")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("pipeline", help="LFR grid to heatmaps, histograms and block means")
    p.add_argument("--grid", help="JSON grid (keys: " + ", ".join(sorted(PIPELINE_KEYS)) + ")")
    p.add_argument("--abs-means", action="store_true")
    _measure_flags(p)
    p.add_argument("-o", "--out-dir", required=True)
    p.set_defaults(func=cmd_pipeline)
    return ap


def _subparsers(ap):
    for a in ap._actions:
        if isinstance(a, argparse._SubParsersAction):
            return a.choices
    return {}


def _apply_config(ap, argv):
    """Load ``--config`` JSON as defaults of the chosen subcommand.  Flags
    given on the command line still win; unknown keys are rejected."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    subs = _subparsers(ap)
    cmd = next((t for t in rest if t in subs), None)
    if cmd is None:
        return
    try:
        with open(known.config, encoding="utf-8") as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        ap.error(f"cannot read config: {e}")
    if not isinstance(cfg, dict):
        ap.error("config must be a JSON object")
    sp = subs[cmd]
    dests = {a.dest: a for a in sp._actions if a.dest not in ("help", "func")}
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    unknown = sorted(set(cfg) - set(dests))
    if unknown:
        ap.error(f"unknown config keys for {cmd}: {', '.join(unknown)}")
    for k in cfg:
        dests[k].required = False
    sp.set_defaults(**cfg)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except UsageError as e:
        print(f"comcent {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LfrError as e:
        print(f"comcent {args.command}: {e}", file=sys.stderr)
        for k, v in sorted(e.diagnostics.items()):
            print(f"  {k}: {v}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError, RuntimeError, KeyError) as e:
        print(f"comcent {args.command}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
