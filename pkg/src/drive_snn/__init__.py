"""Spiking neural network vehicle / non-vehicle image classifier.

Rate-coded grayscale images drive a three-layer fully connected network of
leaky integrate-and-fire neurons, trained with surrogate-gradient
backpropagation through time and AdamW.
"""

from .snn import LifConfig, ModelConfig, SpikingNetwork, forward_pass
from .training import TrainConfig, evaluate, fit

__version__ = "0.1.0"

__all__ = ["LifConfig", "ModelConfig", "SpikingNetwork", "TrainConfig", "evaluate", "fit", "forward_pass"]
