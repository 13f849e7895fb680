"""Rank-correlation heatmaps and the regression suite built on them."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import centrality as cl
from . import community as cm
from .graph import Graph
from .partition import Partition

UNDEFINED = math.nan


class AnalysisError(ValueError):
    pass


def is_undefined(x) -> bool:
    return x is None or (isinstance(x, float) and math.isnan(x))


# -- Kendall tau-b -------------------------------------------------------------

def _count_inversions(seq: list) -> int:
    """Strict inversions (i < j, seq[i] > seq[j]) by bottom-up merge sort."""
    n = len(seq)
    a = list(seq)
    buf = [None] * n
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[k] = a[j]
                    inv += mid - i
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            buf[k:k + mid - i] = a[i:mid]
            k += mid - i
            buf[k:k + hi - j] = a[j:hi]
        a, buf = buf, a
        width *= 2
    return inv


def _tie_pairs(values) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def kendall_tau_b(x, y) -> float:
    """Tau-b in O(n log n); ``UNDEFINED`` if either vector is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise AnalysisError("kendall_tau_b needs two vectors of equal length")
    n = len(x)
    if n < 2:
        raise AnalysisError("kendall_tau_b needs at least two observations")
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(x)
    n2 = _tie_pairs(y)
    if n1 == n0 or n2 == n0:
        return UNDEFINED
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    # pairs tied in both coordinates
    joint = np.ones(n, dtype=bool)
    joint[1:] = (xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1])
    run = np.diff(np.flatnonzero(np.concatenate([joint, [True]])))
    n3 = int(np.sum(run * (run - 1) // 2))
    discordant = _count_inversions(ys.tolist())
    concordant = n0 - n1 - n2 + n3 - discordant
    return (concordant - discordant) / math.sqrt((n0 - n1) * (n0 - n2))


def kendall_tau_b_pairs(x, y) -> float:
    """O(n^2) reference by explicit pair classification."""
    n = len(x)
    c = d = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                tx += 1
                ty += 1
            elif dx == 0:
                tx += 1
            elif dy == 0:
                ty += 1
            elif (dx > 0) == (dy > 0):
                c += 1
            else:
                d += 1
    n0 = n * (n - 1) // 2
    if tx == n0 or ty == n0:
        return UNDEFINED
    return (c - d) / math.sqrt((n0 - tx) * (n0 - ty))


# -- heatmaps -----------------------------------------------------------------

@dataclass
class CorrelationMatrix:
    rows: tuple
    cols: tuple
    values: np.ndarray          # NaN marks an undefined coefficient
    blocks: dict = field(default_factory=lambda: dict(cm.BLOCKS))

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.rows), len(self.cols)):
            raise AnalysisError("matrix shape does not match its labels")
        ok = ~np.isnan(self.values)
        if np.any(np.abs(self.values[ok]) > 1 + 1e-12):
            raise AnalysisError("tau values must lie in [-1, 1]")

    def block(self, name: str) -> np.ndarray:
        ids = self.blocks[name]
        idx = [self.cols.index(c) for c in ids]
        return self.values[:, idx]

    def get(self, row: str, col: str) -> float:
        return float(self.values[self.rows.index(row), self.cols.index(col)])


def measure_vectors(g: Graph, p: Partition,
                    params: cl.CentralityParams = cl.DEFAULT_PARAMS,
                    mixed: cm.MixedParams = cm.DEFAULT_MIXED,
                    threads: int = 1) -> tuple[dict, dict]:
    """All 10 classical and 28 community-aware vectors, each computed once."""
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            futs = {m: ex.submit(cl.classical, g, m, params) for m in cl.CLASSICAL_IDS}
            classical = {m: f.result() for m, f in futs.items()}
    else:
        classical = cl.all_classical(g, params)
    aware = cm.all_community_aware(g, p, params, mixed,
                                   betweenness=classical["b"].scores)
    return classical, aware


def correlation_matrix(classical: dict, aware: dict, threads: int = 1) -> CorrelationMatrix:
    rows = cl.CLASSICAL_IDS
    cols = cm.COMMUNITY_IDS
    pairs = [(r, c) for r in rows for c in cols]

    def one(rc):
        return kendall_tau_b(classical[rc[0]].scores, aware[rc[1]].scores)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            taus = list(ex.map(one, pairs))
    else:
        taus = [one(rc) for rc in pairs]
    return CorrelationMatrix(rows, cols, np.array(taus).reshape(len(rows), len(cols)))


def heatmap(g: Graph, p: Partition,
            params: cl.CentralityParams = cl.DEFAULT_PARAMS,
            mixed: cm.MixedParams = cm.DEFAULT_MIXED,
            threads: int = 1) -> CorrelationMatrix:
    classical, aware = measure_vectors(g, p, params, mixed, threads)
    return correlation_matrix(classical, aware, threads)


def mean_heatmap(mats: list[CorrelationMatrix]) -> CorrelationMatrix:
    """Entrywise mean over runs, ignoring undefined entries."""
    stack = np.stack([m.values for m in mats])
    with np.errstate(invalid="ignore"):
        ok = ~np.isnan(stack)
        total = np.where(ok, stack, 0.0).sum(axis=0)
        cnt = ok.sum(axis=0)
        avg = np.where(cnt > 0, total / np.maximum(cnt, 1), np.nan)
    return CorrelationMatrix(mats[0].rows, mats[0].cols, avg, dict(mats[0].blocks))


@dataclass(frozen=True)
class BlockMeans:
    local: float
    global_: float
    mixed: float

    def __iter__(self):
        return iter((self.local, self.global_, self.mixed))


def block_means(m: CorrelationMatrix, absolute: bool = False) -> BlockMeans:
    """Mean of the defined tau values in each block (signed by default)."""
    out = []
    for name in ("local", "global", "mixed"):
        vals = m.block(name).ravel()
        vals = vals[~np.isnan(vals)]
        if not len(vals):
            raise AnalysisError(f"every entry of the {name} block is undefined")
        if absolute:
            vals = np.abs(vals)
        out.append(float(vals.mean()))
    return BlockMeans(*out)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    modal_class: tuple[float, float]


def histogram(values, bin_width: float = 0.05) -> Histogram:
    """Half-open bins ``[k w, (k+1) w)`` covering [-1, 1]; 1.0 joins the last
    bin when it falls on an edge.  Ties for the modal class go to the lower bin.
    """
    if not bin_width > 0:
        raise AnalysisError("bin_width must be positive")
    v = np.asarray([x for x in values if not is_undefined(x)], dtype=np.float64)
    if not len(v):
        raise AnalysisError("histogram of an empty sample")
    k_lo = int(math.floor(-1.0 / bin_width + 1e-9))
    k_hi = int(math.ceil(1.0 / bin_width - 1e-9))
    nbins = k_hi - k_lo
    edges = bin_width * np.arange(k_lo, k_hi + 1)
    idx = np.floor(v / bin_width + 1e-9).astype(np.int64) - k_lo
    idx = np.clip(idx, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    k = int(np.argmax(counts))  # first maximum = lowest bin
    return Histogram(edges, counts, (round(float(edges[k]), 10), round(float(edges[k + 1]), 10)))


def compare_heatmaps(a: CorrelationMatrix, b: CorrelationMatrix, block: str) -> float:
    """Pearson correlation over one block's entries defined in both."""
    if a.values.shape != b.values.shape or a.cols != b.cols or a.rows != b.rows:
        raise AnalysisError("heatmaps differ in shape or measure ordering")
    x = a.block(block).ravel()
    y = b.block(block).ravel()
    ok = ~(np.isnan(x) | np.isnan(y))
    if ok.sum() < 3:
        raise AnalysisError("fewer than 3 shared defined entries")
    return float(np.corrcoef(x[ok], y[ok])[0, 1])


@dataclass(frozen=True)
class CorrEdge:
    classical: str
    community: str
    tau: float
    block: str


def threshold_network(m: CorrelationMatrix, threshold: float = 0.70) -> list[CorrEdge]:
    """Bipartite edges for every pair with tau strictly above ``threshold``."""
    if not -1.0 < threshold < 1.0:
        raise AnalysisError("threshold must lie in (-1, 1)")
    block_of = {c: name for name, ids in m.blocks.items() for c in ids}
    edges = []
    for i, r in enumerate(m.rows):
        for j, c in enumerate(m.cols):
            t = m.values[i, j]
            if not math.isnan(t) and t > threshold:
                edges.append(CorrEdge(r, c, float(t), block_of.get(c, "")))
    return edges


# -- regression -----------------------------------------------------------------

@dataclass
class RegressionResult:
    feature: str
    block: str
    estimator: str
    slope: float = math.nan
    intercept: float = math.nan
    p_value: float = math.nan
    r_squared: float = math.nan
    std_error: float = math.nan
    ci95: tuple = (math.nan, math.nan)
    n: int = 0
    status: str = "OK"

    @property
    def stars(self) -> str:
        if self.status != "OK" or math.isnan(self.p_value):
            return ""
        if self.p_value <= 0.01:
            return "**"
        if self.p_value <= 0.05:
            return "*"
        return ""

    def as_dict(self):
        d = asdict(self)
        d["ci95_low"], d["ci95_high"] = d.pop("ci95")
        d["stars"] = self.stars
        return d


def _inference(slope, se, n, feature, block, estimator, intercept, r2):
    df = n - 2
    if se == 0:
        p = 1.0 if slope == 0 else 0.0
    else:
        p = float(2 * stats.t.sf(abs(slope / se), df))
    half = float(stats.t.ppf(0.975, df)) * se
    return RegressionResult(feature, block, estimator, float(slope), float(intercept),
                            p, float(r2), float(se), (float(slope - half), float(slope + half)), n)


def _weighted_fit(x, y, w, feature, block, estimator):
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    if sxx <= 0:
        raise AnalysisError("regressor has zero variance")
    sxy = (w * (x - xm) * (y - ym)).sum()
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - intercept - slope * x
    sse = (w * resid ** 2).sum()
    sst = (w * (y - ym) ** 2).sum()
    n = len(x)
    se = math.sqrt(sse / (n - 2) / sxx)
    r2 = 1.0 - sse / sst if sst > 0 else 0.0
    return _inference(slope, se, n, feature, block, estimator, intercept, r2)


def ols(x, y, feature: str = "", block: str = "") -> RegressionResult:
    """Simple linear regression from the normal equations."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise AnalysisError("x and y differ in length")
    if len(x) < 3:
        raise AnalysisError("ols needs at least 3 observations")
    return _weighted_fit(x, y, np.ones_like(x), feature, block, "OLS")


WLS_EPS = 1e-12


def wls_wooldridge(x, y, feature: str = "", block: str = "") -> RegressionResult:
    """Feasible WLS: the variance function is ``exp`` of a linear fit of
    ``log(resid^2)`` on ``x``; observations are weighted by its inverse."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 5:
        raise AnalysisError("wls needs at least 5 observations")
    first = ols(x, y, feature, block)
    resid = y - first.intercept - first.slope * x
    scale = max(1.0, float(np.max(np.abs(y))))
    if np.max(np.abs(resid)) <= 1e-12 * scale:
        first.estimator = "WLS"
        return first
    aux = ols(x, np.log(resid ** 2 + WLS_EPS))
    h = np.exp(aux.intercept + aux.slope * x)
    return _weighted_fit(x, y, 1.0 / h, feature, block, "WLS")


FEATURES = (
    "density", "transitivity", "assortativity", "avg_distance", "diameter",
    "efficiency", "gamma_pred",
    "mixing_parameter", "modularity", "internal_distance", "internal_density",
    "max_odf", "avg_odf", "flake_odf", "embeddedness", "hub_dominance",
)


def _num(v):
    if v is None or v == "":
        return math.nan
    return float(v)


def _truthy(v):
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes")
    return bool(v)


def regression_suite(corpus: list[dict], estimators=("OLS", "WLS")) -> list[RegressionResult]:
    """Every feature x {local, global} x estimator.

    ``corpus`` rows carry the 16 features, ``ks_pass``, ``mean_local`` and
    ``mean_global``.  Undefined values drop the network for that feature
    only; ``gamma_pred`` additionally requires ``ks_pass``.
    """
    if len(corpus) < 10:
        raise AnalysisError("regression suite needs at least 10 networks")
    results = []
    fit = {"OLS": ols, "WLS": wls_wooldridge}
    for feature in FEATURES:
        for block, key in (("LOCAL", "mean_local"), ("GLOBAL", "mean_global")):
            xs, ys = [], []
            for row in corpus:
                xv, yv = _num(row.get(feature)), _num(row.get(key))
                if math.isnan(xv) or math.isnan(yv):
                    continue
                if feature == "gamma_pred" and not _truthy(row.get("ks_pass")):
                    continue
                xs.append(xv)
                ys.append(yv)
            for est in estimators:
                need = 5 if est == "WLS" else 3
                try:
                    if len(xs) < need:
                        raise AnalysisError("too few usable points")
                    res = fit[est](xs, ys, feature, block)
                except AnalysisError:
                    res = RegressionResult(feature, block, est, n=len(xs), status="SKIPPED")
                results.append(res)
    return results
