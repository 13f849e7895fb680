"""CSV readers and writers for the tabular outputs."""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .analysis import CorrelationMatrix, CorrEdge, Histogram, RegressionResult
from .graph import Graph
from .netstats import FEATURE_NAMES


class TableError(ValueError):
    pass


def fmt(x) -> str:
    """12 significant digits; NaN becomes an empty cell."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _render(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _write(path, text: str):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _read(path_or_text, is_text=False):
    if is_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8", newline="") as f:
            text = f.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise TableError("empty CSV")
    return rows[0], rows[1:]


# -- centrality ------------------------------------------------------------------

def format_centrality(g: Graph, vectors: dict) -> str:
    ids = list(vectors)
    cols = [np.asarray(vectors[m].scores if hasattr(vectors[m], "scores") else vectors[m])
            for m in ids]
    rows = ([g.labels[i]] + [fmt(c[i]) for c in cols] for i in range(g.n))
    return _render(["node"] + ids, rows)


# -- heatmap ---------------------------------------------------------------------

def format_heatmap(m: CorrelationMatrix) -> str:
    rows = ([r] + [fmt(v) for v in m.values[i]] for i, r in enumerate(m.rows))
    return _render([""] + list(m.cols), rows)


def parse_heatmap(path_or_text, is_text=False) -> CorrelationMatrix:
    from . import centrality as cl
    from . import community as cm

    header, body = _read(path_or_text, is_text)
    cols = tuple(header[1:])
    rows = tuple(r[0] for r in body)
    if set(rows) != set(cl.CLASSICAL_IDS) or set(cols) != set(cm.COMMUNITY_IDS):
        missing = sorted(set(cl.CLASSICAL_IDS) - set(rows)) + sorted(set(cm.COMMUNITY_IDS) - set(cols))
        extra = sorted(set(rows) - set(cl.CLASSICAL_IDS)) + sorted(set(cols) - set(cm.COMMUNITY_IDS))
        raise TableError(f"heatmap measure ids mismatch (missing {missing}, unexpected {extra})")
    vals = np.array([[float(v) if v != "" else math.nan for v in r[1:]] for r in body])
    if vals.shape != (len(rows), len(cols)):
        raise TableError("ragged heatmap CSV")
    # put into canonical order
    ri = [rows.index(r) for r in cl.CLASSICAL_IDS]
    ci = [cols.index(c) for c in cm.COMMUNITY_IDS]
    return CorrelationMatrix(cl.CLASSICAL_IDS, cm.COMMUNITY_IDS, vals[np.ix_(ri, ci)])


# -- histogram / threshold network -------------------------------------------------

def format_histogram(h: Histogram, block: str) -> str:
    modal = int(np.argmax(h.counts))
    rows = ([block, fmt(h.edges[k]), fmt(h.edges[k + 1]), int(c), fmt(k == modal)]
            for k, c in enumerate(h.counts))
    return _render(["block", "bin_low", "bin_high", "count", "modal"], rows)


def format_corr_edges(edges: list[CorrEdge]) -> str:
    return _render(["classical_id", "ca_id", "tau"],
                   ([e.classical, e.community, fmt(e.tau)] for e in edges))


# -- features / corpus -------------------------------------------------------------

CORPUS_EXTRA = ("mean_local", "mean_global", "mean_mixed")


def format_features(rows: list[dict], extra=()) -> str:
    header = ["network"] + list(FEATURE_NAMES) + ["ks_pass"] + list(extra)
    out = ([r.get("network", "")] + [fmt(r.get(k)) for k in header[1:]] for r in rows)
    return _render(header, out)


def parse_corpus(path_or_text, is_text=False) -> list[dict]:
    header, body = _read(path_or_text, is_text)
    need = set(FEATURE_NAMES) | {"ks_pass", "mean_local", "mean_global"}
    missing = sorted(need - set(header))
    if missing:
        raise TableError(f"corpus CSV lacks columns: {', '.join(missing)}")
    return [dict(zip(header, r)) for r in body]


# -- regression ----------------------------------------------------------------------

REGRESSION_COLUMNS = ("feature", "block", "estimator", "slope", "intercept", "p_value",
                      "r_squared", "std_error", "ci95_low", "ci95_high", "n", "status", "stars")


def format_regression(results: list[RegressionResult]) -> str:
    rows = []
    for r in results:
        d = r.as_dict()
        rows.append([fmt(d[k]) if not isinstance(d[k], str) else d[k] for k in REGRESSION_COLUMNS])
    return _render(REGRESSION_COLUMNS, rows)


def write_text(path, text: str):
    _write(path, text)
