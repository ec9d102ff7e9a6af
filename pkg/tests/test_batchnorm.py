import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from drive_snn.errors import DegenerateBatchError, UsageError
from drive_snn.snn import BatchNormParams, batchnorm_backward, batchnorm_forward


def column(values, gamma=1.0, shift=0.0):
    params = BatchNormParams.identity(1)
    params.gamma[:] = gamma
    params.beta_shift[:] = shift
    y, _ = batchnorm_forward(np.array(values, dtype=float)[:, None], params, "train")
    return y[:, 0]


def test_constant_batch_maps_to_shift():
    assert np.array_equal(column([5, 5, 5]), [0.0, 0.0, 0.0])
    assert np.array_equal(column([5, 5, 5], shift=0.7), [0.7, 0.7, 0.7])


def test_hand_normalization():
    expected = [(x - 2.0) / math.sqrt(2.0 / 3.0 + 1e-5) for x in (1, 2, 3)]
    assert np.max(np.abs(column([1, 2, 3]) - expected)) <= 1e-12
    assert np.allclose(expected, [-1.22473, 0.0, 1.22473], atol=1e-5)


def test_hand_affine():
    expected = [2.0 * (x - 2.0) / math.sqrt(2.0 / 3.0 + 1e-5) + 1.0 for x in (1, 2, 3)]
    assert np.max(np.abs(column([1, 2, 3], gamma=2.0, shift=1.0) - expected)) <= 1e-12
    assert np.allclose(expected, [-1.44946, 1.0, 3.44946], atol=1e-5)


def test_running_stats_update():
    params = BatchNormParams.identity(1)
    batchnorm_forward(np.array([[1.0], [2.0], [3.0]]), params, "train")
    assert params.running_mean[0] == pytest.approx(0.9 * 0 + 0.1 * 2.0)
    assert params.running_var[0] == pytest.approx(0.9 * 1 + 0.1 * (2.0 / 3.0))


def test_eval_mode_uses_running_stats_without_update():
    params = BatchNormParams.identity(2)
    params.running_mean[:] = [1.0, -1.0]
    params.running_var[:] = [4.0, 1.0]
    x = np.array([[3.0, 0.0]])
    y, _ = batchnorm_forward(x, params, "eval")
    assert y[0] == pytest.approx([2.0 / math.sqrt(4 + 1e-5), 1.0 / math.sqrt(1 + 1e-5)])
    assert params.running_mean.tolist() == [1.0, -1.0]


def test_train_mode_needs_two_samples():
    with pytest.raises(DegenerateBatchError):
        batchnorm_forward(np.ones((1, 3)), BatchNormParams.identity(3), "train")


def test_time_stack_uses_per_step_stats():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(4, 5, 3))
    stacked, _ = batchnorm_forward(x, BatchNormParams.identity(3), "train")
    for t in range(4):
        single, _ = batchnorm_forward(x[t], BatchNormParams.identity(3), "train")
        assert np.allclose(stacked[t], single, atol=1e-14)


@settings(max_examples=40)
@given(arrays(np.float64, (6, 3), elements=st.floats(-100, 100)))
def test_train_output_standardized(x):
    x = x + np.arange(6)[:, None] * np.array([1.0, 2.0, 3.0])  # avoid constant columns
    y, _ = batchnorm_forward(x, BatchNormParams(np.ones(3), np.zeros(3), np.zeros(3), np.ones(3), epsilon=1e-12), "train")
    assert np.all(np.abs(y.mean(axis=0)) < 1e-9)
    assert np.all(np.abs(y.var(axis=0) - 1.0) < 1e-9)


def test_backward_zero_grad():
    _, cache = batchnorm_forward(np.random.default_rng(1).normal(size=(4, 3)), BatchNormParams.identity(3), "train")
    gx, gg, gb = batchnorm_backward(np.zeros((4, 3)), cache)
    assert not gx.any() and not gg.any() and not gb.any()


def test_backward_zero_gamma():
    params = BatchNormParams.identity(3)
    params.gamma[:] = 0.0
    _, cache = batchnorm_forward(np.random.default_rng(2).normal(size=(4, 3)), params, "train")
    g = np.random.default_rng(3).normal(size=(4, 3))
    gx, _, gb = batchnorm_backward(g, cache)
    assert not gx.any()
    assert np.array_equal(gb, g.sum(axis=0))


def test_backward_rejects_eval_cache():
    _, cache = batchnorm_forward(np.ones((4, 3)), BatchNormParams.identity(3), "eval")
    with pytest.raises(UsageError):
        batchnorm_backward(np.ones((4, 3)), cache)


def _numeric_grad(f, x, h=1e-5):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        old = x[idx]
        x[idx] = old + h
        up = f()
        x[idx] = old - h
        down = f()
        x[idx] = old
        g[idx] = (up - down) / (2 * h)
    return g


@pytest.mark.parametrize("shape", [(4, 3), (3, 4, 3)])
def test_backward_matches_finite_differences(shape):
    rng = np.random.default_rng(4)
    x = rng.normal(size=shape)
    gamma = rng.normal(size=3)
    shift = rng.normal(size=3)
    upstream = rng.normal(size=shape)

    def loss():
        p = BatchNormParams(gamma, shift, np.zeros(3), np.ones(3))
        return float((batchnorm_forward(x, p, "train")[0] * upstream).sum())

    _, cache = batchnorm_forward(x, BatchNormParams(gamma, shift, np.zeros(3), np.ones(3)), "train")
    gx, gg, gb = batchnorm_backward(upstream, cache)
    for analytic, numeric in ((gx, _numeric_grad(loss, x)), (gg, _numeric_grad(loss, gamma)), (gb, _numeric_grad(loss, shift))):
        assert np.all(np.abs(analytic - numeric) <= 1e-6 * np.maximum(np.abs(numeric), 1e-3))
