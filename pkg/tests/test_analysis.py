import math

import numpy as np
import pytest
from oracles import tau_b_pairs

from comcent import analysis as an
from comcent import centrality as cl
from comcent import community as cm
from comcent.partition import Partition


def full_matrix(value):
    vals = np.full((len(cl.CLASSICAL_IDS), len(cm.COMMUNITY_IDS)), value, dtype=float)
    return an.CorrelationMatrix(cl.CLASSICAL_IDS, cm.COMMUNITY_IDS, vals)


# -- Kendall tau-b -------------------------------------------------------------

def test_tau_identical():
    assert an.kendall_tau_b([1, 2, 3], [1, 2, 3]) == 1.0


def test_tau_reversed():
    assert an.kendall_tau_b([1, 2, 3], [3, 2, 1]) == -1.0


def test_tau_with_ties():
    assert an.kendall_tau_b([1, 1, 2], [1, 2, 3]) == pytest.approx(2 / math.sqrt(6), abs=1e-12)


def test_tau_constant_is_undefined():
    assert an.is_undefined(an.kendall_tau_b([3, 3, 3], [1, 2, 3]))


def test_tau_matches_pair_counting(rng):
    for _ in range(200):
        n = int(rng.integers(2, 40))
        x = rng.integers(0, 5, n)
        y = rng.integers(0, 5, n)
        got, want = an.kendall_tau_b(x, y), tau_b_pairs(x, y)
        if math.isnan(want):
            assert math.isnan(got)
        else:
            assert got == pytest.approx(want, abs=1e-12)


def test_tau_monotone_invariance(rng):
    x = rng.normal(size=60)
    y = rng.normal(size=60)
    assert an.kendall_tau_b(np.exp(x), y) == pytest.approx(an.kendall_tau_b(x, y), abs=1e-12)


# -- heatmaps --------------------------------------------------------------------

def test_heatmap_shape_and_spot_value(tt, p2):
    m = an.heatmap(tt, p2)
    assert m.values.shape == (10, 28)
    d = cl.classical(tt, "d").scores
    pc = cm.community_measure(tt, p2, "pc").scores
    assert m.get("d", "pc") == pytest.approx(tau_b_pairs(d, pc), abs=1e-12)


def test_single_community_global_undefined(tt):
    m = an.heatmap(tt, Partition([0] * tt.n))
    glob = [c for c in cm.GLOBAL_IDS if c.endswith("_G")]
    vals = np.array([[m.get(r, c) for c in glob] for r in cl.CLASSICAL_IDS])
    assert np.isnan(vals).all()


def test_block_means_constant():
    assert tuple(an.block_means(full_matrix(0.5))) == (0.5, 0.5, 0.5)


def test_block_means_skip_undefined():
    m = full_matrix(np.nan)
    m.values[0, m.cols.index(cm.LOCAL_IDS[0])] = 0.2
    m.values[1, m.cols.index(cm.LOCAL_IDS[1])] = 0.4
    with pytest.raises(an.AnalysisError):
        an.block_means(m)
    m.values[:, m.cols.index("pc")] = 0.1
    m.values[:, m.cols.index("nnc")] = -0.3
    means = an.block_means(m)
    assert means.local == pytest.approx(0.3)
    assert means.global_ == pytest.approx(-0.3)
    assert an.block_means(m, absolute=True).global_ == pytest.approx(0.3)


def test_block_means_order_independent(rng):
    m = full_matrix(0.0)
    m.values[:] = rng.uniform(-1, 1, m.values.shape)
    perm = rng.permutation(len(m.rows))
    shuffled = an.CorrelationMatrix(tuple(m.rows[i] for i in perm), m.cols, m.values[perm])
    assert tuple(an.block_means(m)) == pytest.approx(tuple(an.block_means(shuffled)))


# -- histogram -------------------------------------------------------------------

def test_histogram_modal_class():
    h = an.histogram([0.72] * 5, bin_width=0.1)
    assert h.modal_class == pytest.approx((0.7, 0.8))
    assert h.counts.sum() == 5


def test_histogram_tie_goes_low():
    h = an.histogram([0.12, 0.55], bin_width=0.1)
    assert h.modal_class == pytest.approx((0.1, 0.2))


def test_histogram_lower_boundary():
    h = an.histogram([-1.0], bin_width=0.1)
    assert h.modal_class == pytest.approx((-1.0, -0.9))


def test_histogram_upper_boundary():
    h = an.histogram([1.0], bin_width=0.1)
    assert h.modal_class == pytest.approx((0.9, 1.0))


def test_histogram_rejects_empty():
    with pytest.raises(an.AnalysisError):
        an.histogram([math.nan])


# -- heatmap comparison and threshold network -----------------------------------

def test_compare_heatmaps_signs(rng):
    a = full_matrix(0.0)
    a.values[:] = rng.uniform(-1, 1, a.values.shape)
    b = full_matrix(0.0)
    b.values[:] = -a.values
    assert an.compare_heatmaps(a, a, "local") == pytest.approx(1.0)
    assert an.compare_heatmaps(a, b, "mixed") == pytest.approx(-1.0)


def test_compare_heatmaps_needs_three():
    a = full_matrix(np.nan)
    a.values[:2, 0] = [0.1, 0.2]
    with pytest.raises(an.AnalysisError):
        an.compare_heatmaps(a, a, "local")


def test_threshold_is_strict():
    assert an.threshold_network(full_matrix(0.70), 0.70) == []
    edges = an.threshold_network(full_matrix(0.71), 0.70)
    assert len(edges) == 280
    assert {e.block for e in edges} == {"local", "global", "mixed"}


def test_threshold_monotone(rng):
    m = full_matrix(0.0)
    m.values[:] = rng.uniform(-1, 1, m.values.shape)
    sizes = [len(an.threshold_network(m, t)) for t in np.linspace(-0.9, 0.9, 10)]
    assert sizes == sorted(sizes, reverse=True)


# -- regression ------------------------------------------------------------------

def test_ols_exact_fit():
    r = an.ols([0, 1, 2], [0, 1, 2])
    assert r.slope == pytest.approx(1.0)
    assert r.intercept == pytest.approx(0.0, abs=1e-12)
    assert r.r_squared == pytest.approx(1.0)


def test_ols_constant_y():
    r = an.ols([0, 1, 2, 3], [5, 5, 5, 5])
    assert r.slope == 0.0
    assert r.r_squared == 0.0


def test_ols_noisy_line():
    rng = np.random.default_rng(1)
    x = np.arange(50, dtype=float) / 10
    y = 2 * x + rng.normal(size=50)
    r = an.ols(x, y)
    assert 1.8 <= r.slope <= 2.2
    assert r.p_value < 0.01
    assert r.ci95[0] < r.slope < r.ci95[1]


def test_ols_slope_relates_to_pearson(rng):
    x = rng.normal(size=40)
    y = 0.5 * x + rng.normal(size=40)
    r = an.ols(x, y)
    assert r.slope * x.std() / y.std() == pytest.approx(np.corrcoef(x, y)[0, 1])


def test_ols_zero_variance():
    with pytest.raises(an.AnalysisError):
        an.ols([1, 1, 1], [1, 2, 3])


def test_wls_exact_fit_matches_ols():
    x = np.arange(8, dtype=float)
    assert an.wls_wooldridge(x, 3 * x + 1).slope == pytest.approx(an.ols(x, 3 * x + 1).slope)


def test_wls_heteroskedastic_se():
    rng = np.random.default_rng(7)
    x = np.linspace(1, 10, 200)
    y = 1 + 0.5 * x + rng.normal(size=200) * x ** 1.5
    assert an.wls_wooldridge(x, y).std_error <= an.ols(x, y).std_error


def test_wls_needs_five():
    with pytest.raises(an.AnalysisError):
        an.wls_wooldridge([0, 1, 2, 3], [1, 2, 3, 5])


def _corpus(rng, n):
    rows = []
    for i in range(n):
        mu = 0.05 + 0.65 * i / max(n - 1, 1)
        row = {f: rng.uniform() for f in an.FEATURES}
        row.update(mixing_parameter=mu, ks_pass=True,
                   mean_local=0.8 - mu + 0.01 * rng.normal(),
                   mean_global=0.1 + mu + 0.01 * rng.normal())
        rows.append(row)
    return rows


def test_suite_needs_ten(rng):
    with pytest.raises(an.AnalysisError):
        an.regression_suite(_corpus(rng, 9))


def test_suite_shape_and_direction(rng):
    res = an.regression_suite(_corpus(rng, 12))
    assert len(res) == len(an.FEATURES) * 2 * 2
    by = {(r.feature, r.block, r.estimator): r for r in res}
    assert by["mixing_parameter", "LOCAL", "OLS"].slope < 0
    assert by["mixing_parameter", "GLOBAL", "OLS"].slope > 0
    assert by["mixing_parameter", "LOCAL", "OLS"].stars == "**"


def test_suite_skips_sparse_feature(rng):
    rows = _corpus(rng, 12)
    for r in rows[2:]:
        r["assortativity"] = math.nan
    for r in rows[4:]:
        r["ks_pass"] = False
    res = {(r.feature, r.block, r.estimator): r for r in an.regression_suite(rows)}
    assert res["assortativity", "LOCAL", "OLS"].status == "SKIPPED"
    assert res["assortativity", "LOCAL", "OLS"].stars == ""
    assert res["gamma_pred", "GLOBAL", "OLS"].status == "OK"
    assert res["gamma_pred", "GLOBAL", "OLS"].n == 4
    assert res["gamma_pred", "GLOBAL", "WLS"].status == "SKIPPED"
