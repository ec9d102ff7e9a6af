"""Binary classification metrics: confusion matrix, ROC curve and AUC.

The positive class is 1 (vehicle).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0


@dataclass(frozen=True)
class RocCurve:
    points: list[tuple[float, float]]
    auc: float


def confusion(labels, predictions) -> ConfusionMatrix:
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape:
        raise ValueError(f"{labels.size} labels but {predictions.size} predictions")
    if not (np.isin(labels, (0, 1)).all() and np.isin(predictions, (0, 1)).all()):
        raise ValueError("labels and predictions must be binary")
    return ConfusionMatrix(
        tp=int(((labels == 1) & (predictions == 1)).sum()),
        tn=int(((labels == 0) & (predictions == 0)).sum()),
        fp=int(((labels == 0) & (predictions == 1)).sum()),
        fn=int(((labels == 1) & (predictions == 0)).sum()),
    )


def _split(labels, scores):
    labels = np.asarray(labels, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape:
        raise ValueError(f"{labels.size} labels but {scores.size} scores")
    pos, neg = scores[labels == 1], scores[labels == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("AUC is undefined without both positive and negative samples")
    return pos, neg


def auc_rank(labels, scores) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) with ties counted as half.

    Computed from midranks of the pooled scores in O(n log n).
    """
    pos, neg = _split(labels, scores)
    pooled = np.concatenate([pos, neg])
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(len(pooled))
    sorted_scores = pooled[order]
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    # twice the U statistic is an integer, so this division is exact up to one rounding
    u2 = 2.0 * ranks[: len(pos)].sum() - len(pos) * (len(pos) + 1)
    return float(u2 / (2.0 * len(pos) * len(neg)))


def roc_curve(labels, scores) -> list[tuple[float, float]]:
    """(fpr, tpr) points from sweeping the threshold down through each distinct score."""
    pos, neg = _split(labels, scores)
    points = [(0.0, 0.0)]
    for thr in np.unique(np.concatenate([pos, neg]))[::-1]:
        points.append((float((neg >= thr).sum() / len(neg)), float((pos >= thr).sum() / len(pos))))
    return points


def trapezoid_area(points) -> float:
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def roc_auc(labels, scores) -> RocCurve:
    return RocCurve(roc_curve(labels, scores), auc_rank(labels, scores))
