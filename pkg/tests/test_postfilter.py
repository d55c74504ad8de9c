import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lithoflow import ValidationError
from lithoflow.postfilter import FilterSpec, median3d, movavg
from oracles import full_sort_median3d


@pytest.mark.parametrize("seed", range(20))
def test_median3d_matches_full_sort(seed):
    vol = np.random.default_rng(seed).normal(size=(8, 8, 8))
    np.testing.assert_array_equal(median3d(vol), full_sort_median3d(vol))


def test_median3d_window5_and_ties():
    rng = np.random.default_rng(1)
    vol = rng.integers(0, 4, size=(6, 7, 5)).astype(float)
    np.testing.assert_array_equal(median3d(vol, 5), full_sort_median3d(vol, 5))
    np.testing.assert_array_equal(median3d(vol, 3), full_sort_median3d(vol, 3))


def test_median3d_even_count_takes_lower_middle():
    # corner window holds 8 values: 0..7 -> lower middle 3
    vol = np.arange(8.0).reshape(2, 2, 2)
    assert median3d(vol)[0, 0, 0] == 3.0


def test_median3d_constant_and_impulse():
    np.testing.assert_array_equal(median3d(np.full((4, 5, 6), 2.5)), 2.5)
    vol = np.zeros((5, 5, 5))
    vol[2, 2, 2] = 9.0
    np.testing.assert_array_equal(median3d(vol), 0.0)


def test_median3d_large_volume_slabs():
    # more than one slab of inlines
    vol = np.random.default_rng(2).normal(size=(40, 60, 70))
    out = median3d(vol)
    ref = full_sort_median3d(vol[18:22, :6, :6])
    np.testing.assert_array_equal(out[19:21, :5, :5], ref[1:3, :5, :5])


@pytest.mark.parametrize("w", [0, 2, 4, -3, 2.5])
def test_even_window_rejected(w):
    with pytest.raises(ValidationError):
        median3d(np.zeros((3, 3, 3)), w)
    with pytest.raises(ValidationError):
        movavg(np.zeros((3, 3)), w)


def test_median3d_rejects_bad_input():
    with pytest.raises(ValidationError):
        median3d(np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        median3d(np.full((3, 3, 3), np.nan))


def test_movavg_row_example():
    np.testing.assert_allclose(movavg(np.array([[0.0, 3.0, 0.0]])), [[1.5, 1.0, 1.5]], atol=1e-15)


def test_movavg_constant_and_volume():
    np.testing.assert_allclose(movavg(np.full((3, 4, 5), 7.0)), 7.0, rtol=0, atol=1e-14)
    vol = np.random.default_rng(3).normal(size=(3, 4, 5))
    out = movavg(vol)
    for i in range(3):
        np.testing.assert_allclose(out[i], movavg(vol[i]), atol=1e-15)
    # averaging along other axes
    assert movavg(vol, axes=(0, 2)).shape == vol.shape
    with pytest.raises(ValidationError):
        movavg(vol, axes=(1, 1))
    with pytest.raises(ValidationError):
        movavg(np.zeros(5))


@given(arrays(float, (4, 6), elements=st.floats(-1e3, 1e3)),
       arrays(float, (4, 6), elements=st.floats(-1e3, 1e3)),
       st.floats(-10, 10), st.floats(-10, 10))
@settings(max_examples=50)
def test_movavg_linear(X, Y, a, b):
    lhs = movavg(a * X + b * Y)
    rhs = a * movavg(X) + b * movavg(Y)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * max(1.0, np.abs(a * X).max(),
                                                                   np.abs(b * Y).max()))


@given(arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)),
              elements=st.floats(-100, 100)))
@settings(max_examples=40)
def test_median3d_shape_and_range(vol):
    out = median3d(vol)
    assert out.shape == vol.shape
    assert out.min() >= vol.min() and out.max() <= vol.max()


def test_filter_spec():
    spec = FilterSpec("movavg", 3)
    vol = np.random.default_rng(4).normal(size=(3, 3, 3))
    np.testing.assert_array_equal(spec.apply(vol), movavg(vol))
    np.testing.assert_array_equal(FilterSpec().apply(vol), median3d(vol))
    with pytest.raises(ValidationError):
        FilterSpec("gauss")
    with pytest.raises(ValidationError):
        FilterSpec(boundary="reflect")
