from .bptt import backward_pass
from .loop import EarlyStopping, EvalResult, TrainConfig, TrainReport, evaluate, fit, train_epoch
from .loss import ce_rate_loss, predict
from .optim import AdamW, AdamWState, adamw_step, sgd_step

__all__ = [
    "AdamW",
    "AdamWState",
    "EarlyStopping",
    "EvalResult",
    "TrainConfig",
    "TrainReport",
    "adamw_step",
    "backward_pass",
    "ce_rate_loss",
    "evaluate",
    "fit",
    "predict",
    "sgd_step",
    "train_epoch",
]
