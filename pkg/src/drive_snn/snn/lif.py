"""Leaky integrate-and-fire dynamics and the fast-sigmoid surrogate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError


@dataclass
class LifConfig:
    """Neuron constants.

    Attributes:
        beta: membrane decay per step, in (0, 1).
        threshold: firing threshold.
        surrogate_slope: slope ``k`` of the surrogate ``1 / (1 + k|u|)**2``.
    """

    beta: float = 0.95
    threshold: float = 1.0
    surrogate_slope: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.threshold <= 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if self.surrogate_slope <= 0:
            raise ValueError(f"surrogate_slope must be positive, got {self.surrogate_slope}")


@dataclass
class LifLayerState:
    membrane: np.ndarray

    @classmethod
    def zeros(cls, batch: int, neurons: int) -> "LifLayerState":
        return cls(np.zeros((batch, neurons)))


def lif_step(state: LifLayerState, input_current, cfg: LifConfig):
    """Advance one step: integrate, fire on ``V >= threshold``, subtract-reset.

    Returns ``(spikes, new_state)``. ``spikes`` is a float 0/1 array.
    """
    current = np.asarray(input_current, dtype=np.float64)
    if current.shape != state.membrane.shape:
        raise ShapeError(f"input current {current.shape} does not match membrane {state.membrane.shape}")
    v_pre = cfg.beta * state.membrane + current
    spikes = (v_pre >= cfg.threshold).astype(np.float64)
    return spikes, LifLayerState(v_pre - spikes * cfg.threshold)


def surrogate_grad(u, slope: float = 1.0):
    """Fast-sigmoid surrogate derivative ``(1 / (1 + slope*|u|))**2``.

    ``u`` is the membrane potential measured from threshold.
    """
    return (1.0 / (1.0 + slope * np.abs(u))) ** 2


def fast_sigmoid(u, slope: float = 1.0):
    """Smooth stand-in for the spike: ``u / (1 + slope*|u|)``.

    Its exact derivative is :func:`surrogate_grad`, so a network run with
    this in place of the Heaviside step has true gradients equal to the
    surrogate gradients. Used for gradient checking.
    """
    return u / (1.0 + slope * np.abs(u))


def simulate_layer(currents: np.ndarray, cfg: LifConfig, relaxed: bool = False):
    """Run a LIF layer over a (T, B, N) stack of input currents.

    Returns ``(outputs, v_pre)``, both (T, B, N). ``v_pre`` is the membrane
    before reset at each step, which is what the backward pass needs.
    With ``relaxed`` the emitted output is :func:`fast_sigmoid` of the
    threshold-centred membrane instead of a binary spike; the reset still
    uses the hard spike.
    """
    steps = currents.shape[0]
    membrane = np.zeros(currents.shape[1:])
    outputs = np.empty_like(currents)
    v_pre = np.empty_like(currents)
    for t in range(steps):
        v = cfg.beta * membrane + currents[t]
        spikes = (v >= cfg.threshold).astype(np.float64)
        membrane = v - spikes * cfg.threshold
        v_pre[t] = v
        outputs[t] = fast_sigmoid(v - cfg.threshold, cfg.surrogate_slope) if relaxed else spikes
    return outputs, v_pre


def lif_backward(grad_out: np.ndarray, v_pre: np.ndarray, cfg: LifConfig, grad_membrane=None) -> np.ndarray:
    """Backpropagate through time across one LIF layer.

    ``grad_out`` is dL/d(output) per step, shape (T, B, N). The spike is
    differentiated with the surrogate at ``v_pre - threshold``; the reset
    path is treated as a constant, so credit flows back only through the
    ``beta * V`` leak. ``grad_membrane`` optionally adds a direct dL/dV_pre
    term per step (membrane readouts).

    Returns dL/d(input current) per step.
    """
    if grad_out.shape != v_pre.shape:
        raise ShapeError(f"gradient {grad_out.shape} does not match trace {v_pre.shape}")
    sg = surrogate_grad(v_pre - cfg.threshold, cfg.surrogate_slope)
    grad_in = np.empty_like(grad_out)
    carry = np.zeros(grad_out.shape[1:])
    for t in range(grad_out.shape[0] - 1, -1, -1):
        g = grad_out[t] * sg[t] + carry
        if grad_membrane is not None:
            g = g + grad_membrane[t]
        grad_in[t] = g
        carry = cfg.beta * g
    return grad_in
