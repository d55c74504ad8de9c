import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import joint_histogram_nmi, relief_oracle
from sklearn.utils.estimator_checks import check_transformer_general

from lithoflow.exceptions import DegenerateInputError, ValidationError
from lithoflow.stats import (ConfusionCounts, NormParams, RangeScaler, ReliefSelector, ZScoreScaler,
                             entropy_bits, g_metric, minmax, minmax_params, nmi, psd, psd_entropy,
                             regression_metrics, relief_weights, zscore, zscore_params)

finite = st.floats(-1e6, 1e6, allow_nan=False)


# -- normalisation ------------------------------------------------------------

def test_zscore_population_sigma():
    z, p = zscore([1.0, 2.0, 3.0])
    s = np.sqrt(1.5)
    assert np.allclose(z, [-s, 0.0, s], atol=1e-12, rtol=0)
    assert p.center[0] == 2.0


def test_zscore_idempotent_on_standardized():
    x = np.random.default_rng(1).normal(size=500)
    z, _ = zscore(x)
    assert np.allclose(zscore(z)[0], z, atol=1e-9, rtol=0)


def test_zscore_constant():
    with pytest.raises(DegenerateInputError):
        zscore([5.0, 5.0, 5.0])


def test_minmax_endpoints():
    y, _ = minmax([0.0, 0.5, 1.0])
    assert np.allclose(y, [0.1, 0.5, 0.9], atol=1e-15, rtol=0)


def test_minmax_constant():
    with pytest.raises(DegenerateInputError):
        minmax([3.0, 3.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=2, max_size=50).filter(lambda v: max(v) - min(v) > 1e-3))
def test_minmax_roundtrip_and_order(values):
    x = np.array(values)
    y, p = minmax(x)
    assert np.allclose(p.inverse(y), x, atol=1e-12 * max(1.0, np.abs(x).max()), rtol=0)
    assert np.all(np.diff(y[np.argsort(x)]) >= -1e-15)
    assert y.min() == pytest.approx(0.1) and y.max() == pytest.approx(0.9)


def test_norm_params_dict_roundtrip():
    X = np.random.default_rng(2).normal(size=(20, 3))
    for p in (zscore_params(X), minmax_params(X)):
        back = NormParams.from_dict(p.to_dict())
        assert np.array_equal(back.apply(X), p.apply(X))


def test_scalers_follow_transformer_api():
    X = np.random.default_rng(0).normal(size=(30, 3))
    check_transformer_general("ZScoreScaler", ZScoreScaler())
    r = RangeScaler().fit(X)
    assert np.allclose(r.inverse_transform(r.transform(X)), X, atol=1e-12, rtol=0)
    assert RangeScaler(feature_range=(0.2, 0.8)).get_params()["feature_range"] == (0.2, 0.8)


# -- information measures -----------------------------------------------------

def test_psd_bin_sinusoid():
    n, k = 256, 17
    x = np.sin(2 * np.pi * k * np.arange(n) / n)
    f, p = psd(x, fs=n)
    assert p[k] == pytest.approx(1.0, abs=1e-12)
    assert f[k] == k


def test_psd_white_noise_entropy():
    x = np.random.default_rng(5).normal(size=4096)
    h = psd_entropy(x)
    assert h > np.log2(2049) - 1.0


def test_psd_zero_signal():
    with pytest.raises(DegenerateInputError):
        psd(np.zeros(16))


@pytest.mark.parametrize("p,h", [([0.25] * 4, 2.0), ([1.0, 0.0, 0.0], 0.0), ([0.5, 0.25, 0.25], 1.5)])
def test_entropy_examples(p, h):
    assert entropy_bits(p) == pytest.approx(h, abs=1e-12)


@pytest.mark.parametrize("p", [[0.5, 0.6], [-0.1, 1.1]])
def test_entropy_invalid(p):
    with pytest.raises(ValidationError):
        entropy_bits(p)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=30).filter(lambda v: sum(v) > 1e-3))
def test_entropy_bounded_by_uniform(w):
    p = np.array(w) / np.sum(w)
    h = entropy_bits(p)
    assert h <= np.log2(p.size) + 1e-12
    uniform = np.allclose(p, 1.0 / p.size, atol=1e-12, rtol=0)
    if not uniform:
        assert h < np.log2(p.size) + 1e-12


def test_nmi_self_and_reflection():
    x = np.random.default_rng(0).normal(size=2000)
    assert nmi(x, x) == pytest.approx(1.0, abs=1e-9)
    assert nmi(x, -x) == pytest.approx(1.0, abs=1e-9)


def test_nmi_independent():
    rng = np.random.default_rng(42)
    assert nmi(rng.random(10_000), rng.random(10_000), n_bins=16) < 0.05


def test_nmi_matches_joint_histogram_oracle():
    rng = np.random.default_rng(9)
    x = rng.normal(size=600)
    a = np.tanh(x) + 0.3 * rng.normal(size=600)
    assert nmi(x, a, 16) == pytest.approx(joint_histogram_nmi(x, a, 16), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_nmi_symmetric(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=300)
    a = x ** 2 + rng.normal(size=300)
    assert abs(nmi(x, a, 16) - nmi(a, x, 16)) <= 1e-9


def test_nmi_constant():
    with pytest.raises(DegenerateInputError):
        nmi(np.ones(100), np.arange(100.0))


# -- metrics ------------------------------------------------------------------

def test_metrics_identity():
    m = regression_metrics([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    assert (m.cc, m.rmse, m.aem) == (1.0, 0.0, 0.0) and m.si == 0.0


def test_metrics_offset():
    m = regression_metrics([1.0, 2.0, 3.0], [0.0, 1.0, 2.0])
    assert m.rmse == pytest.approx(1.0) and m.aem == pytest.approx(1.0)
    assert m.cc == pytest.approx(1.0) and m.si == pytest.approx(1.0)


def test_metrics_anticorrelated():
    assert regression_metrics([0.0, -1.0, -3.0], [0.0, 1.0, 3.0]).cc == pytest.approx(-1.0)


def test_metrics_zero_mean_obs_si_absent():
    assert regression_metrics([1.0, 0.0, -1.0], [-1.0, 0.0, 1.0]).si is None


def test_metrics_constant():
    with pytest.raises(DegenerateInputError):
        regression_metrics([1.0, 1.0, 1.0], [0.0, 1.0, 2.0])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.floats(0.01, 100), st.floats(-100, 100))
def test_cc_affine_invariant(seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=(2, 50))
    assert regression_metrics(a * x + b, y).cc == pytest.approx(regression_metrics(x, y).cc, abs=1e-9)


def test_g_examples():
    assert g_metric(ConfusionCounts(5, 0, 7, 0)) == 1.0
    assert g_metric(ConfusionCounts(0, 4, 7, 1)) == 0.0
    assert g_metric(ConfusionCounts(9, 1, 80, 20)) == pytest.approx(np.sqrt(0.72), abs=1e-12)


def test_g_empty_class():
    with pytest.raises(ValidationError):
        g_metric(ConfusionCounts(0, 0, 4, 1))


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_g_swap_invariant(tp, fn, tn, fp):
    if tp + fn == 0 or tn + fp == 0:
        return
    assert g_metric(ConfusionCounts(tp, fn, tn, fp)) == pytest.approx(
        g_metric(ConfusionCounts(tn, fp, tp, fn)), abs=1e-15)


# -- Relief -------------------------------------------------------------------

def test_relief_label_copy_beats_noise():
    rng = np.random.default_rng(0)
    y = rng.integers(0, 2, 200)
    X = np.column_stack([y.astype(float), rng.random(200)])
    w = relief_weights(X, y, m=200, seed=0)
    assert w[0] - w[1] >= 0.2


def test_relief_duplicate_and_constant_columns():
    rng = np.random.default_rng(1)
    x = rng.normal(size=80)
    y = (x + 0.5 * rng.normal(size=80) > 0).astype(int)
    w = relief_weights(np.column_stack([x, x, np.full(80, 2.0)]), y)
    assert w[0] == pytest.approx(w[1], abs=1e-12)
    assert abs(w[2]) <= 1e-12


def test_relief_matches_loop_oracle():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(60, 3))
    y = (X[:, 0] + 0.3 * rng.normal(size=60) > 0).astype(int)
    picks = np.random.default_rng(11).permutation(60)
    assert np.allclose(relief_weights(X, y, seed=11), relief_oracle(X, y, picks), atol=1e-12, rtol=0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_relief_permutation_equivariant(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(40, 4))
    y = (X[:, 1] > 0).astype(int)
    if y.min() == y.max():
        return
    perm = rng.permutation(4)
    w = relief_weights(X, y, seed=3)
    assert np.allclose(relief_weights(X[:, perm], y, seed=3), w[perm], atol=1e-12, rtol=0)


def test_relief_single_class():
    with pytest.raises(ValidationError):
        relief_weights(np.random.default_rng(0).normal(size=(10, 2)), np.zeros(10))


def test_relief_selector():
    rng = np.random.default_rng(0)
    y = rng.integers(0, 2, 150)
    X = np.column_stack([rng.random(150), y + 0.1 * rng.random(150), rng.random(150)])
    sel = ReliefSelector(n_features_to_select=1).fit(X, y)
    assert sel.get_support().tolist() == [False, True, False]
    assert sel.transform(X).shape == (150, 1)
