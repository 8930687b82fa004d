"""Exact and plus-or-minus-one metrics, schema-compatible with the primary.

Every quantity is a ratio of integer counts evaluated in a fixed order
(row-band numerators, column-band precision denominators, macro means over
classes with nonzero denominators), and the JSON serialization below matches
the primary ``eval`` output byte for byte on the same confusion matrix --
the golden-fixture test holds that line.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np


def confusion_from_predictions(true_classes, predicted_classes, n_classes: int) -> np.ndarray:
    m = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(true_classes, predicted_classes):
        if not (1 <= int(t) <= n_classes and 1 <= int(p) <= n_classes):
            raise ValueError(f"classes must lie in 1..{n_classes}")
        m[int(t) - 1, int(p) - 1] += 1
    return m


def metrics_report(matrix) -> dict:
    m = np.asarray(matrix, dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("confusion matrix must be square")
    n = int(m.sum())
    if n == 0:
        raise ValueError("empty confusion matrix")
    k = m.shape[0]

    diag = int(np.trace(m))
    band_hits = 0
    for i in range(k):
        for j in range(max(i - 1, 0), min(i + 2, k)):
            band_hits += int(m[i, j])

    recalls: list[float] = []
    precisions: list[float] = []
    for c in range(k):
        band = range(max(c - 1, 0), min(c + 2, k))
        correct = sum(int(m[c, j]) for j in band)
        n_true = int(m[c, :].sum())
        n_predicted = sum(int(m[:, j].sum()) for j in band)
        recalls.append(float(correct) / float(n_true) if n_true else float("nan"))
        precisions.append(float(correct) / float(n_predicted) if n_predicted else float("nan"))

    def _mean(values: list[float], label: str) -> float:
        kept = [v for v in values if v == v]
        if len(kept) < len(values):
            warnings.warn(f"{len(values) - len(kept)} class(es) skipped in mean {label}")
        if not kept:
            raise ValueError(f"no class has a nonzero denominator for {label}")
        return sum(kept) / float(len(kept))

    mean_r = _mean(recalls, "recall_pm1")
    mean_p = _mean(precisions, "precision_pm1")
    f1 = 2.0 * mean_r * mean_p / (mean_r + mean_p) if mean_r + mean_p > 0 else 0.0
    return {
        "n": n,
        "n_classes": k,
        "acc": float(diag) / float(n),
        "acc_pm1": float(band_hits) / float(n),
        "recall_pm1_mean": mean_r,
        "precision_pm1_mean": mean_p,
        "f1_pm1": f1,
        "recall_pm1_per_class": [None if v != v else v for v in recalls],
        "precision_pm1_per_class": [None if v != v else v for v in precisions],
    }


def write_metrics_json(report: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
