"""Confusion-matrix accumulation and the exact / plus-or-minus-one metrics.

A prediction within one ordinal class of the truth counts as correct for the
``_pm1`` family: ``acc_pm1`` sums the tridiagonal band of the matrix, and
per class ``k`` the recall denominator is the true count ``N_k`` while the
precision denominator is everything predicted into columns ``k-1..k+1``.
Classes with a zero denominator are skipped in the macro means (with a
warning).  All quantities are ratios of exact integer counts, so results are
reproducible bit for bit across implementations that follow the same
evaluation order -- which is what the JSON schema relies on.
"""

from __future__ import annotations

import warnings

import numpy as np


class ConfusionMatrix:
    """K x K integer tally; rows are true classes, columns predictions (1-based)."""

    def __init__(self, n_classes: int):
        if n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        self.m = np.zeros((n_classes, n_classes), dtype=np.int64)

    @property
    def n_classes(self) -> int:
        return self.m.shape[0]

    @property
    def total(self) -> int:
        return int(self.m.sum())

    def accumulate(self, true_class: int, predicted_class: int, count: int = 1) -> "ConfusionMatrix":
        k = self.n_classes
        if not (1 <= true_class <= k and 1 <= predicted_class <= k):
            raise ValueError(f"classes must lie in 1..{k}")
        self.m[true_class - 1, predicted_class - 1] += count
        return self

    def accumulate_arrays(self, true_classes, predicted_classes) -> "ConfusionMatrix":
        for t, p in zip(np.asarray(true_classes), np.asarray(predicted_classes)):
            self.accumulate(int(t), int(p))
        return self

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        """Elementwise sum -- partial tallies from workers form a monoid."""
        if other.n_classes != self.n_classes:
            raise ValueError("cannot merge matrices of different K")
        self.m += other.m
        return self

    @classmethod
    def from_array(cls, array) -> "ConfusionMatrix":
        a = np.asarray(array, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(a < 0):
            raise ValueError("confusion matrix entries must be >= 0")
        cm = cls(a.shape[0])
        cm.m = a.copy()
        return cm


def acc(cm: ConfusionMatrix) -> float:
    """Standard accuracy: diagonal mass over total."""
    n = cm.total
    if n == 0:
        raise ValueError("empty confusion matrix")
    return float(int(np.trace(cm.m))) / float(n)


def acc_pm1(cm: ConfusionMatrix) -> float:
    """Accuracy counting predictions within one class of the truth as correct."""
    n = cm.total
    if n == 0:
        raise ValueError("empty confusion matrix")
    k = cm.n_classes
    hits = 0
    for i in range(k):
        for j in range(max(i - 1, 0), min(i + 2, k)):
            hits += int(cm.m[i, j])
    return float(hits) / float(n)


def prf_pm1(cm: ConfusionMatrix):
    """Macro recall, precision and F1 at plus-or-minus one class.

    Returns ``(mean_recall, mean_precision, f1, recall_per_class,
    precision_per_class)`` where the per-class lists contain ``nan`` for
    classes skipped because their denominator is zero.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    k = cm.n_classes
    recalls: list[float] = []
    precisions: list[float] = []
    for c in range(k):
        band = range(max(c - 1, 0), min(c + 2, k))
        correct = sum(int(cm.m[c, j]) for j in band)
        n_true = int(cm.m[c, :].sum())
        n_predicted = sum(int(cm.m[:, j].sum()) for j in band)
        recalls.append(float(correct) / float(n_true) if n_true else float("nan"))
        precisions.append(float(correct) / float(n_predicted) if n_predicted else float("nan"))

    def _mean(values: list[float], label: str) -> float:
        kept = [v for v in values if v == v]  # drop nan
        if len(kept) < len(values):
            warnings.warn(f"{len(values) - len(kept)} class(es) skipped in mean {label}")
        if not kept:
            raise ValueError(f"no class has a nonzero denominator for {label}")
        return sum(kept) / float(len(kept))

    mean_r = _mean(recalls, "recall_pm1")
    mean_p = _mean(precisions, "precision_pm1")
    f1 = 2.0 * mean_r * mean_p / (mean_r + mean_p) if mean_r + mean_p > 0 else 0.0
    return mean_r, mean_p, f1, recalls, precisions


def metrics_report(cm: ConfusionMatrix) -> dict:
    """The canonical metric dictionary serialized by the ``eval`` command."""
    mean_r, mean_p, f1, recalls, precisions = prf_pm1(cm)
    return {
        "n": cm.total,
        "n_classes": cm.n_classes,
        "acc": acc(cm),
        "acc_pm1": acc_pm1(cm),
        "recall_pm1_mean": mean_r,
        "precision_pm1_mean": mean_p,
        "f1_pm1": f1,
        "recall_pm1_per_class": [None if v != v else v for v in recalls],
        "precision_pm1_per_class": [None if v != v else v for v in precisions],
    }
