"""Cross-entropy rate loss and spike-count prediction."""

from __future__ import annotations

import numpy as np


def _log_softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def ce_rate_loss(outputs, labels):
    """Per-step softmax cross entropy, averaged over steps and samples.

    ``outputs`` is (T, B, C), the output layer's spikes at every step used
    directly as logits. Returns ``(loss, grad)`` with ``grad`` of the same
    shape as ``outputs``.
    """
    outputs = np.asarray(outputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    steps, batch, classes = outputs.shape
    if steps < 1:
        raise ValueError("need at least one time step")
    if labels.shape != (batch,):
        raise ValueError(f"expected {batch} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise ValueError(f"labels must lie in [0, {classes}), got {labels.tolist()}")

    logp = _log_softmax(outputs)
    rows = np.arange(batch)
    loss = -logp[:, rows, labels].sum() / (steps * batch)

    grad = np.exp(logp)
    grad[:, rows, labels] -= 1.0
    grad /= steps * batch
    return float(loss), grad


def predict(outputs):
    """Class = most spikes over all steps (ties go to the lower index).

    Returns ``(classes, scores)`` where ``scores`` is the softmax of the
    per-class firing rate, shape (B, C).
    """
    outputs = np.asarray(outputs, dtype=np.float64)
    counts = outputs.sum(axis=0)
    classes = counts.argmax(axis=1)
    scores = np.exp(_log_softmax(counts / outputs.shape[0]))
    return classes, scores
