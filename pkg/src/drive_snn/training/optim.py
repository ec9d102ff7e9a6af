"""Parameter update rules: plain SGD and AdamW with decoupled weight decay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError


def _check_shapes(theta, grad):
    if np.shape(theta) != np.shape(grad):
        raise ShapeError(f"parameter shape {np.shape(theta)} does not match gradient shape {np.shape(grad)}")


def sgd_step(theta, grad, eta: float):
    """Return ``theta - eta * grad``."""
    _check_shapes(theta, grad)
    return np.asarray(theta, dtype=np.float64) - eta * np.asarray(grad, dtype=np.float64)


@dataclass
class AdamWState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0


def adamw_step(theta, grad, state: AdamWState, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=1e-2):
    """One AdamW update of a dict of parameter arrays.

    ``theta`` and ``grad`` map names to arrays. Returns ``(new_theta,
    state)``; ``state`` is advanced in place. Epsilon sits inside the
    square root, and the decay term is scaled by the learning rate:

        theta <- theta - lr * m_hat / sqrt(v_hat + eps) - lr * weight_decay * theta
    """
    if theta.keys() != grad.keys():
        raise ShapeError(f"parameter names {sorted(theta)} differ from gradient names {sorted(grad)}")
    state.t += 1
    bc1 = 1.0 - beta1**state.t
    bc2 = 1.0 - beta2**state.t
    new_theta = {}
    for name, p in theta.items():
        g = np.asarray(grad[name], dtype=np.float64)
        _check_shapes(p, g)
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(g)
            v = np.zeros_like(g)
        elif m.shape != g.shape:
            raise ShapeError(f"optimizer state for {name} has shape {m.shape}, gradient has {g.shape}")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        state.m[name] = m
        state.v[name] = v
        m_hat = m / bc1
        v_hat = v / bc2
        p = np.asarray(p, dtype=np.float64)
        new_theta[name] = p - lr * m_hat / np.sqrt(v_hat + eps) - lr * weight_decay * p
    return new_theta, state


class AdamW:
    """Stateful wrapper applying :func:`adamw_step` to a network in place."""

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=1e-2):
        if lr < 0:
            raise ValueError("learning rate must be non-negative")
        if not (0 < beta1 < 1 and 0 < beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        self.hparams = dict(lr=lr, beta1=beta1, beta2=beta2, eps=eps, weight_decay=weight_decay)
        self.state = AdamWState()

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        new, self.state = adamw_step(params, grads, self.state, **self.hparams)
        for name, value in new.items():
            params[name][...] = value
