"""Epoch loop: train, evaluate on the held-out set, stop early on a stalled test loss."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset, EncoderConfig, batches, rate_encode
from ..errors import EmptyDatasetError
from ..numerics import Rng
from ..snn import SpikingNetwork
from .bptt import backward_pass
from .loss import ce_rate_loss, predict
from .optim import AdamW

logger = logging.getLogger(__name__)

# stream ids for Rng.fork, keeping train/eval spike draws independent
_TRAIN_STREAM = 1
_EVAL_STREAM = 2


@dataclass
class TrainConfig:
    batch_size: int = 30
    learning_rate: float = 1e-3
    epochs: int = 20
    patience: int = 5
    weight_decay: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    encoding: str = "rate"

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")

    def make_optimizer(self) -> AdamW:
        return AdamW(self.learning_rate, self.beta1, self.beta2, self.adam_epsilon, self.weight_decay)


@dataclass
class EvalResult:
    loss: float
    accuracy: float
    labels: np.ndarray
    predictions: np.ndarray
    scores: np.ndarray  # (n, num_classes)


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    test_loss: list[float] = field(default_factory=list)
    test_accuracy: list[float] = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0
    best_loss: float = float("inf")


def _encoder(cfg: TrainConfig, num_steps: int, *keys: int) -> EncoderConfig:
    return EncoderConfig(cfg.encoding, num_steps, Rng(cfg.seed).fork(*keys).seed)


def train_epoch(model: SpikingNetwork, ds: Dataset, optimizer: AdamW, cfg: TrainConfig, epoch: int = 1):
    """One pass over ``ds`` in a fresh per-epoch order. Returns ``(mean loss, accuracy)``.

    A trailing batch of a single sample is skipped: batch statistics are
    undefined for it.
    """
    if len(ds) == 0:
        raise EmptyDatasetError("cannot train on an empty dataset")
    steps = model.config.num_steps
    params = model.parameters()
    total_loss, correct, seen = 0.0, 0, 0
    for b, (pixels, labels) in enumerate(batches(ds, cfg.batch_size, cfg.seed, True, epoch)):
        if len(labels) < 2:
            logger.warning("epoch %d: skipping trailing batch of size 1", epoch)
            continue
        inputs = rate_encode(pixels, _encoder(cfg, steps, _TRAIN_STREAM, epoch, b))
        outputs, trace = model.forward(inputs, mode="train")
        loss, grad = ce_rate_loss(outputs, labels)
        grads = backward_pass(trace, grad, model.layers, model.config)
        optimizer.step(params, grads)

        classes, _ = predict(outputs)
        total_loss += loss * len(labels)
        correct += int((classes == labels).sum())
        seen += len(labels)
    if seen == 0:
        raise EmptyDatasetError("no trainable batch (need at least 2 samples)")
    return total_loss / seen, correct / seen


def evaluate(model: SpikingNetwork, ds: Dataset, cfg: TrainConfig) -> EvalResult:
    """Eval-mode pass in dataset order with fixed spike draws; mutates nothing."""
    if len(ds) == 0:
        raise EmptyDatasetError("cannot evaluate on an empty dataset")
    steps = model.config.num_steps
    total_loss = 0.0
    preds, scores = [], []
    for b, (pixels, labels) in enumerate(batches(ds, cfg.batch_size)):
        inputs = rate_encode(pixels, _encoder(cfg, steps, _EVAL_STREAM, b))
        outputs, _ = model.forward(inputs, mode="eval")
        loss, _ = ce_rate_loss(outputs, labels)
        total_loss += loss * len(labels)
        c, s = predict(outputs)
        preds.append(c)
        scores.append(s)
    predictions = np.concatenate(preds)
    return EvalResult(
        loss=total_loss / len(ds),
        accuracy=float((predictions == ds.labels).mean()),
        labels=ds.labels.copy(),
        predictions=predictions,
        scores=np.concatenate(scores),
    )


class EarlyStopping:
    """Tracks the best test loss and a snapshot of the model that achieved it.

    Improvement means strictly lower loss. ``update`` returns True once
    ``patience`` consecutive epochs have passed without improvement.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best_loss = float("inf")
        self.best_epoch = 0
        self.epochs_since_improvement = 0
        self.best_snapshot = None

    def update(self, epoch: int, loss: float, model: SpikingNetwork) -> bool:
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
            self.epochs_since_improvement = 0
            self.best_snapshot = model.copy()
        else:
            self.epochs_since_improvement += 1
        return self.epochs_since_improvement >= self.patience


def fit(model: SpikingNetwork, train: Dataset, test: Dataset, cfg: TrainConfig, on_epoch=None):
    """Train for up to ``cfg.epochs`` epochs with early stopping on the test loss.

    The test set doubles as the early-stopping monitor, so the final test
    metrics are not an unbiased estimate.

    ``on_epoch(epoch, train_loss, train_acc, test_loss, test_acc)`` is
    called after every epoch. Returns ``(best_model, report)``.
    """
    optimizer = cfg.make_optimizer()
    stopper = EarlyStopping(cfg.patience)
    report = TrainReport()
    for epoch in range(1, cfg.epochs + 1):
        tr_loss, tr_acc = train_epoch(model, train, optimizer, cfg, epoch)
        result = evaluate(model, test, cfg)
        report.train_loss.append(tr_loss)
        report.train_accuracy.append(tr_acc)
        report.test_loss.append(result.loss)
        report.test_accuracy.append(result.accuracy)
        report.stopped_epoch = epoch
        if on_epoch is not None:
            on_epoch(epoch, tr_loss, tr_acc, result.loss, result.accuracy)
        if stopper.update(epoch, result.loss, model):
            logger.info("early stop after epoch %d (best epoch %d)", epoch, stopper.best_epoch)
            break
    report.best_epoch = stopper.best_epoch
    report.best_loss = stopper.best_loss
    return stopper.best_snapshot, report
