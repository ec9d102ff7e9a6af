"""Three-layer fully connected spiking network: (Linear -> BatchNorm -> LIF) x 3."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from ..numerics import Rng, init_weights
from .batchnorm import BatchNormCache, BatchNormParams, batchnorm_forward
from .lif import LifConfig, simulate_layer


@dataclass
class ModelConfig:
    input_size: int = 128 * 128
    hidden_size: int = 64
    num_classes: int = 2
    num_steps: int = 50
    lif: LifConfig = field(default_factory=LifConfig)

    def __post_init__(self):
        if isinstance(self.lif, dict):
            self.lif = LifConfig(**self.lif)
        for name in ("input_size", "hidden_size", "num_classes", "num_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def widths(self) -> list[int]:
        return [self.input_size, self.hidden_size, self.hidden_size, self.num_classes]


@dataclass
class LayerParams:
    weights: np.ndarray
    bias: np.ndarray
    bn: BatchNormParams

    def __post_init__(self):
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[1],):
            raise ShapeError(f"bias {self.bias.shape} does not fit weights {self.weights.shape}")
        if self.bn.width != self.weights.shape[1]:
            raise ShapeError("batch norm width does not match layer width")


class SpikingNetwork:
    """Parameters of the full stack plus the config that shaped them."""

    PARAM_NAMES = ("weights", "bias", "gamma", "beta_shift")

    def __init__(self, config: ModelConfig, layers: list[LayerParams]):
        if len(layers) != 3:
            raise ShapeError(f"expected 3 layers, got {len(layers)}")
        for i, (layer, fan_in, fan_out) in enumerate(zip(layers, config.widths[:-1], config.widths[1:])):
            if layer.weights.shape != (fan_in, fan_out):
                raise ShapeError(f"layer {i + 1}: weights {layer.weights.shape}, expected {(fan_in, fan_out)}")
        self.config = config
        self.layers = layers

    @classmethod
    def initialize(cls, config: ModelConfig, rng: Rng) -> "SpikingNetwork":
        layers = [
            LayerParams(init_weights(rng, fan_in, fan_out), np.zeros(fan_out), BatchNormParams.identity(fan_out))
            for fan_in, fan_out in zip(config.widths[:-1], config.widths[1:])
        ]
        return cls(config, layers)

    def parameters(self) -> dict[str, np.ndarray]:
        """Trainable arrays keyed ``layer{i}.{name}``; the arrays are live views."""
        out = {}
        for i, layer in enumerate(self.layers, start=1):
            out[f"layer{i}.weights"] = layer.weights
            out[f"layer{i}.bias"] = layer.bias
            out[f"layer{i}.gamma"] = layer.bn.gamma
            out[f"layer{i}.beta_shift"] = layer.bn.beta_shift
        return out

    def copy(self) -> "SpikingNetwork":
        return copy.deepcopy(self)

    def forward(self, inputs, mode: str = "eval", relaxed: bool = False):
        return forward_pass(self.layers, inputs, self.config, mode, relaxed)


@dataclass
class LayerTrace:
    inputs: np.ndarray  # (T, B, in); bool for the encoded input layer
    v_pre: np.ndarray  # (T, B, out)
    bn_cache: BatchNormCache


@dataclass
class Trace:
    layers: list[LayerTrace]
    mode: str
    relaxed: bool


def _linear(x: np.ndarray, layer: LayerParams) -> np.ndarray:
    if x.dtype == np.float64:
        return x @ layer.weights + layer.bias
    # binary inputs: convert one step at a time to bound memory
    out = np.empty((x.shape[0], x.shape[1], layer.weights.shape[1]))
    for t in range(x.shape[0]):
        out[t] = x[t].astype(np.float64) @ layer.weights + layer.bias
    return out


def forward_pass(layers: list[LayerParams], inputs, cfg: ModelConfig, mode: str = "eval", relaxed: bool = False):
    """Simulate ``cfg.num_steps`` steps of the network.

    ``inputs`` is (T, B, input_size): binary spikes (bool or 0/1) for rate
    coding, or real currents for constant-current coding. Membranes start
    at zero. In train mode batch statistics are taken per step and the
    running statistics of every layer are updated.

    Returns ``(output, trace)`` where ``output`` is (T, B, num_classes).
    """
    x = np.asarray(inputs)
    if x.dtype != np.bool_:
        x = x.astype(np.float64, copy=False)
    if x.ndim != 3 or x.shape[0] != cfg.num_steps or x.shape[2] != cfg.input_size:
        raise ShapeError(
            f"input layer: expected ({cfg.num_steps}, B, {cfg.input_size}) input, got {x.shape}"
        )
    traces = []
    for i, layer in enumerate(layers, start=1):
        if x.shape[2] != layer.weights.shape[0]:
            raise ShapeError(f"layer {i}: input width {x.shape[2]} but weights are {layer.weights.shape}")
        z = _linear(x, layer)
        a, cache = batchnorm_forward(z, layer.bn, mode)
        out, v_pre = simulate_layer(a, cfg.lif, relaxed)
        traces.append(LayerTrace(x, v_pre, cache))
        x = out
    return x, Trace(traces, mode, relaxed)
