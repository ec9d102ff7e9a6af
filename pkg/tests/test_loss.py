import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from drive_snn.training import ce_rate_loss, predict


def spikes(*steps):
    return np.array(steps, dtype=float)[:, None, :]


def test_uniform_logits_is_ln2():
    loss, _ = ce_rate_loss(spikes([0, 0]), [1])
    assert abs(loss - math.log(2)) <= 1e-12


def test_one_hot_spike():
    loss, _ = ce_rate_loss(spikes([1, 0]), [0])
    assert abs(loss - math.log(1 + math.exp(-1))) <= 1e-12
    assert abs(loss - 0.3133) < 1e-4


def test_two_step_average():
    loss, _ = ce_rate_loss(spikes([1, 0], [0, 0]), [0])
    assert abs(loss - (math.log(1 + math.exp(-1)) + math.log(2)) / 2) <= 1e-12
    assert abs(loss - 0.5032) < 1e-4


def test_label_out_of_range():
    with pytest.raises(ValueError):
        ce_rate_loss(spikes([0, 0]), [2])


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    out = rng.normal(size=(3, 4, 2))
    labels = np.array([0, 1, 1, 0])
    _, grad = ce_rate_loss(out, labels)
    h = 1e-6
    for idx in np.ndindex(out.shape):
        up, down = out.copy(), out.copy()
        up[idx] += h
        down[idx] -= h
        fd = (ce_rate_loss(up, labels)[0] - ce_rate_loss(down, labels)[0]) / (2 * h)
        assert abs(fd - grad[idx]) < 1e-8


@given(arrays(np.float64, (3, 5, 2), elements=st.sampled_from([0.0, 1.0])), st.lists(st.integers(0, 1), min_size=5, max_size=5))
def test_loss_non_negative(out, labels):
    assert ce_rate_loss(out, labels)[0] >= 0


@given(st.integers(1, 6), st.integers(1, 4), st.integers(2, 5), st.data())
def test_constant_vectors_give_ln_classes(steps, batch, classes, data):
    levels = data.draw(arrays(np.float64, (steps, batch, 1), elements=st.sampled_from([0.0, 1.0])))
    labels = data.draw(st.lists(st.integers(0, classes - 1), min_size=batch, max_size=batch))
    loss, _ = ce_rate_loss(np.repeat(levels, classes, axis=2), labels)
    assert abs(loss - math.log(classes)) <= 1e-12


def test_predict_majority():
    out = np.zeros((50, 1, 2))
    out[:, 0, 0] = 1
    cls, scores = predict(out)
    assert cls[0] == 0
    assert abs(scores[0, 0] - math.e / (math.e + 1)) <= 1e-12
    assert abs(scores[0, 0] - 0.7311) < 1e-4


def test_predict_tie_goes_low():
    out = np.zeros((50, 1, 2))
    out[:10, 0, :] = 1
    cls, scores = predict(out)
    assert cls[0] == 0
    assert scores[0].tolist() == [0.5, 0.5]


def test_predict_mirror():
    out = np.zeros((50, 1, 2))
    out[:, 0, 1] = 1
    assert predict(out)[0][0] == 1
