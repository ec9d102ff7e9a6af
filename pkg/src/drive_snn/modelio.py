"""Versioned JSON model files.

Floats are written with ``repr`` precision, so save -> load -> save is
byte-identical and loaded weights are bit-exact.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .errors import ModelFormatError
from .snn import BatchNormParams, LayerParams, ModelConfig, SpikingNetwork
from .training import TrainConfig

FORMAT_VERSION = 1


def model_to_dict(model: SpikingNetwork, train_config: TrainConfig | None = None, metadata: dict | None = None) -> dict:
    layers = []
    for layer in model.layers:
        bn = layer.bn
        layers.append(
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "bn": {
                    "gamma": bn.gamma.tolist(),
                    "beta_shift": bn.beta_shift.tolist(),
                    "running_mean": bn.running_mean.tolist(),
                    "running_var": bn.running_var.tolist(),
                    "momentum": bn.momentum,
                    "epsilon": bn.epsilon,
                },
            }
        )
    return {
        "format_version": FORMAT_VERSION,
        "model_config": dataclasses.asdict(model.config),
        "train_config": dataclasses.asdict(train_config) if train_config is not None else None,
        "metadata": metadata or {},
        "layers": layers,
    }


def model_from_dict(doc: dict):
    """Inverse of :func:`model_to_dict`; returns ``(model, train_config, metadata)``."""
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ModelFormatError("not a model file (no format_version)")
    if doc["format_version"] != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format_version {doc['format_version']!r} (expected {FORMAT_VERSION})")
    try:
        config = ModelConfig(**doc["model_config"])
        layers = []
        for entry in doc["layers"]:
            bn = entry["bn"]
            layers.append(
                LayerParams(
                    np.array(entry["weights"], dtype=np.float64),
                    np.array(entry["bias"], dtype=np.float64),
                    BatchNormParams(
                        np.array(bn["gamma"], dtype=np.float64),
                        np.array(bn["beta_shift"], dtype=np.float64),
                        np.array(bn["running_mean"], dtype=np.float64),
                        np.array(bn["running_var"], dtype=np.float64),
                        bn["momentum"],
                        bn["epsilon"],
                    ),
                )
            )
        model = SpikingNetwork(config, layers)
        train_config = TrainConfig(**doc["train_config"]) if doc.get("train_config") else None
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from exc
    return model, train_config, doc.get("metadata", {})


def dumps(model: SpikingNetwork, train_config: TrainConfig | None = None, metadata: dict | None = None) -> str:
    return json.dumps(model_to_dict(model, train_config, metadata), indent=1, allow_nan=False) + "\n"


def save_model(path, model: SpikingNetwork, train_config: TrainConfig | None = None, metadata: dict | None = None):
    Path(path).write_text(dumps(model, train_config, metadata))


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    return model_from_dict(doc)
