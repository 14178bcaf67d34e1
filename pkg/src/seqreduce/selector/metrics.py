"""Weighted classification metrics over the three-method label space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_CLASSES = 3


@dataclass(frozen=True)
class ClassificationReport:
    accuracy: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    confusion: np.ndarray  # rows = true class, cols = predicted class

    def as_row(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
        }


def evaluate_metrics(y_true, y_pred, n_classes: int = N_CLASSES) -> ClassificationReport:
    """Per-class precision/recall/F1 averaged with true-class supports as
    weights; any 0/0 is scored 0."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have equal length")
    if y_true.size == 0:
        raise ValueError("empty label vectors")
    for arr, name in ((y_true, "y_true"), (y_pred, "y_pred")):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise ValueError(f"{name} contains labels outside [0, {n_classes})")
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (y_true, y_pred), 1)
    support = confusion.sum(axis=1).astype(np.float64)
    predicted = confusion.sum(axis=0).astype(np.float64)
    diag = np.diag(confusion).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(predicted > 0, diag / predicted, 0.0)
        recall = np.where(support > 0, diag / support, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    total = float(support.sum())
    w = support / total
    return ClassificationReport(
        accuracy=float(diag.sum() / total),
        weighted_precision=float(np.sum(w * precision)),
        weighted_recall=float(np.sum(w * recall)),
        weighted_f1=float(np.sum(w * f1)),
        confusion=confusion,
    )
