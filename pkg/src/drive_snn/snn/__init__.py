from .batchnorm import BatchNormCache, BatchNormParams, batchnorm_backward, batchnorm_forward
from .lif import LifConfig, LifLayerState, fast_sigmoid, lif_backward, lif_step, simulate_layer, surrogate_grad
from .network import LayerParams, LayerTrace, ModelConfig, SpikingNetwork, Trace, forward_pass

__all__ = [
    "BatchNormCache",
    "BatchNormParams",
    "LayerParams",
    "LayerTrace",
    "LifConfig",
    "LifLayerState",
    "ModelConfig",
    "SpikingNetwork",
    "Trace",
    "batchnorm_backward",
    "batchnorm_forward",
    "fast_sigmoid",
    "forward_pass",
    "lif_backward",
    "lif_step",
    "simulate_layer",
    "surrogate_grad",
]
