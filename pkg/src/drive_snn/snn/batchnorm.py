"""Per-feature batch normalization with running statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateBatchError, ShapeError, UsageError


@dataclass
class BatchNormParams:
    gamma: np.ndarray
    beta_shift: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1
    epsilon: float = 1e-5

    @classmethod
    def identity(cls, width: int, momentum: float = 0.1, epsilon: float = 1e-5) -> "BatchNormParams":
        return cls(np.ones(width), np.zeros(width), np.zeros(width), np.ones(width), momentum, epsilon)

    def __post_init__(self):
        width = len(self.gamma)
        for name in ("beta_shift", "running_mean", "running_var"):
            if len(getattr(self, name)) != width:
                raise ShapeError(f"{name} has length {len(getattr(self, name))}, expected {width}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.momentum <= 1:
            raise ValueError("momentum must lie in (0, 1]")

    @property
    def width(self) -> int:
        return len(self.gamma)


@dataclass
class BatchNormCache:
    x_hat: np.ndarray
    inv_std: np.ndarray
    gamma: np.ndarray
    train: bool


def batchnorm_forward(x, params: BatchNormParams, mode: str = "train"):
    """Normalize ``x`` over its batch axis and apply the learned affine map.

    ``x`` may be (B, F) or a time stack (T, B, F); in the latter case every
    step gets its own batch statistics and the running averages are updated
    once per step, in step order. Biased variance is used throughout.

    Returns ``(y, cache)``. In train mode ``params.running_mean`` and
    ``params.running_var`` are updated in place.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.width:
        raise ShapeError(f"batchnorm expects {params.width} features, got {x.shape[-1]}")
    if mode == "train":
        if x.shape[-2] < 2:
            raise DegenerateBatchError(f"train-mode batch norm needs batch >= 2, got {x.shape[-2]}")
        mean = x.mean(axis=-2, keepdims=True)
        var = ((x - mean) ** 2).mean(axis=-2, keepdims=True)
        inv_std = 1.0 / np.sqrt(var + params.epsilon)
        x_hat = (x - mean) * inv_std
        m = params.momentum
        for mu, s2 in zip(mean.reshape(-1, params.width), var.reshape(-1, params.width)):
            params.running_mean = (1 - m) * params.running_mean + m * mu
            params.running_var = (1 - m) * params.running_var + m * s2
        train = True
    elif mode == "eval":
        inv_std = 1.0 / np.sqrt(params.running_var + params.epsilon)
        x_hat = (x - params.running_mean) * inv_std
        train = False
    else:
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    y = params.gamma * x_hat + params.beta_shift
    return y, BatchNormCache(x_hat, inv_std, params.gamma.copy(), train)


def batchnorm_backward(grad_y, cache: BatchNormCache):
    """Exact gradients of the train-mode transform.

    Returns ``(grad_x, grad_gamma, grad_beta)``; parameter gradients are
    summed over the batch (and over steps for time stacks).
    """
    if not cache.train:
        raise UsageError("batchnorm_backward needs a cache from a train-mode forward pass")
    grad_y = np.asarray(grad_y, dtype=np.float64)
    if grad_y.shape != cache.x_hat.shape:
        raise ShapeError(f"gradient {grad_y.shape} does not match cache {cache.x_hat.shape}")
    feat = grad_y.shape[-1]
    flat_g = grad_y.reshape(-1, feat)
    grad_beta = flat_g.sum(axis=0)
    grad_gamma = (flat_g * cache.x_hat.reshape(-1, feat)).sum(axis=0)

    g_hat = grad_y * cache.gamma
    n = grad_y.shape[-2]
    grad_x = (cache.inv_std / n) * (
        n * g_hat
        - g_hat.sum(axis=-2, keepdims=True)
        - cache.x_hat * (g_hat * cache.x_hat).sum(axis=-2, keepdims=True)
    )
    return grad_x, grad_gamma, grad_beta
