"""Surrogate-gradient backpropagation through time."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from ..snn import LayerParams, ModelConfig, Trace, batchnorm_backward, lif_backward


def backward_pass(trace: Trace, grad_output, layers: list[LayerParams], cfg: ModelConfig, grad_membranes=None):
    """Gradients of the loss for every trainable array.

    ``grad_output`` is dL/d(output) per step, (T, B, num_classes), as
    returned by :func:`~drive_snn.training.loss.ce_rate_loss`.
    ``grad_membranes`` optionally maps a 0-based layer index to an extra
    dL/dV_pre stack for that layer.

    Layers are processed top-down, each one from the last step to the first.
    Returns a dict keyed like :meth:`SpikingNetwork.parameters`.
    """
    if trace is None or len(trace.layers) != len(layers):
        raise UsageError("backward_pass needs the trace of a forward pass over the same layers")
    if trace.mode != "train":
        raise UsageError("backward_pass needs a train-mode trace")
    grad_membranes = grad_membranes or {}
    grads = {}
    g_out = np.asarray(grad_output, dtype=np.float64)
    for idx in range(len(layers) - 1, -1, -1):
        layer, lt = layers[idx], trace.layers[idx]
        g_current = lif_backward(g_out, lt.v_pre, cfg.lif, grad_membranes.get(idx))
        g_z, g_gamma, g_beta = batchnorm_backward(g_current, lt.bn_cache)

        name = f"layer{idx + 1}"
        g_w = np.zeros_like(layer.weights)
        g_b = np.zeros_like(layer.bias)
        for t in range(g_z.shape[0] - 1, -1, -1):
            g_w += lt.inputs[t].T.astype(np.float64) @ g_z[t]
            g_b += g_z[t].sum(axis=0)
        grads[f"{name}.weights"] = g_w
        grads[f"{name}.bias"] = g_b
        grads[f"{name}.gamma"] = g_gamma
        grads[f"{name}.beta_shift"] = g_beta
        if idx > 0:
            g_out = g_z @ layer.weights.T
    return {k: grads[k] for k in sorted(grads, key=_param_order)}


def _param_order(name: str):
    layer, field = name.split(".")
    return int(layer[5:]), ("weights", "bias", "gamma", "beta_shift").index(field)
