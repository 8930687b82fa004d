"""Desk-scale reference classifier: pooled scalogram features into a linear
softmax model.

The feature map is deliberately simple -- average-pool the (pre-colormap)
scalogram magnitudes to 16x16 and flatten -- so gradients stay analytic and a
full train/eval cycle runs in seconds.  That is enough to exercise every
loss, optimizer and schedule combination end to end; matching the
pretrained-CNN numbers is explicitly not this module's job.

Standardization statistics are computed on the training split only and
frozen into the model, so evaluation on an unseen campaign never leaks its
normalization into the classifier.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import losses as losses_mod
from . import optsched
from .cwt import Scalogram
from .metrics import ConfusionMatrix, acc, acc_pm1

POOL_SIZE = 16
N_FEATURES = POOL_SIZE * POOL_SIZE


def _pool_axis(m: np.ndarray, n_bins: int) -> np.ndarray:
    edges = (np.arange(n_bins + 1) * m.shape[0]) // n_bins
    if np.any(np.diff(edges) < 1):
        raise ValueError(f"cannot pool axis of size {m.shape[0]} into {n_bins} bins")
    sums = np.add.reduceat(m, edges[:-1], axis=0)
    return sums / np.diff(edges)[:, None]


def featurize(scalogram: Scalogram, stats: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """Average-pool magnitudes to 16x16 and flatten; optionally standardize."""
    m = scalogram.magnitudes
    if m.size == 0:
        raise ValueError("empty scalogram")
    pooled = _pool_axis(_pool_axis(m, POOL_SIZE).T, POOL_SIZE).T
    x = pooled.reshape(-1)
    if stats is not None:
        mean, std = stats
        x = (x - mean) / std
    return x


@dataclass
class TrainConfig:
    epochs: int = 3
    batch_size: int = 8
    optimizer: str = "adamw"
    schedule: str = "onecycle"
    lr_max: float = 0.01
    loss: str = "pom1b"
    seed: int = 0
    weight_decay: float = 5e-4
    momentum: float = 0.9
    eval_every: int = 1

    def validate(self) -> None:
        if self.epochs < 0 or self.batch_size < 1 or self.lr_max <= 0:
            raise ValueError("epochs, batch_size and lr_max must be positive")
        if self.loss not in losses_mod.LOSS_KINDS:
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.optimizer not in ("adamw", "sgdm"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def fingerprint(self) -> str:
        blob = json.dumps(self.__dict__, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class LinearSoftmaxModel:
    weights: np.ndarray       # [n_features, K]
    bias: np.ndarray          # [K]
    feature_mean: np.ndarray  # frozen train-set statistics
    feature_std: np.ndarray
    loss_kind: str
    n_classes: int
    fingerprint: str = ""

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Class distribution(s) for raw (unstandardized) feature vectors."""
        x = np.asarray(features, dtype=np.float64)
        squeeze = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.weights.shape[0]:
            raise ValueError(
                f"expected {self.weights.shape[0]} features, got {x.shape[1]}"
            )
        z = ((x - self.feature_mean) / self.feature_std) @ self.weights + self.bias
        p = losses_mod.softmax(z)
        return p[0] if squeeze else p

    def predict_classes(self, features: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(self.predict(features))
        return np.argmax(p, axis=1) + 1


@dataclass
class TrainLogRow:
    iteration: int
    lr: float
    train_loss: float
    val_acc: float
    val_acc_pm1: float


@dataclass
class TrainResult:
    model: LinearSoftmaxModel
    log: list[TrainLogRow] = field(default_factory=list)


def _standardize_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std[std < 1e-8] = 1.0
    return mean, std


def _validate_labels(y: np.ndarray, n_classes: int, who: str) -> None:
    if len(y) == 0:
        raise ValueError(f"{who} split is empty")
    present = set(int(v) for v in y)
    if not present.issubset(set(range(1, n_classes + 1))):
        raise ValueError(f"{who} labels outside 1..{n_classes}")


def _eval_model(model: LinearSoftmaxModel, x: np.ndarray, y: np.ndarray):
    cm = ConfusionMatrix(model.n_classes)
    cm.accumulate_arrays(y, model.predict_classes(x))
    return acc(cm), acc_pm1(cm)


def train(
    train_set: tuple[np.ndarray, np.ndarray],
    val_set: tuple[np.ndarray, np.ndarray],
    cfg: TrainConfig,
    n_classes: int = 7,
) -> TrainResult:
    """Mini-batch training loop; deterministic given ``cfg.seed``.

    ``train_set`` / ``val_set`` are ``(features, labels)`` with raw pooled
    features and 1-based labels.  The per-iteration log carries exactly what
    the learning-curve plots need: learning rate, batch loss and validation
    accuracy at 0 and +/-1 tolerance.
    """
    cfg.validate()
    x_train, y_train = np.asarray(train_set[0], float), np.asarray(train_set[1], int)
    x_val, y_val = np.asarray(val_set[0], float), np.asarray(val_set[1], int)
    _validate_labels(y_train, n_classes, "train")
    _validate_labels(y_val, n_classes, "val")
    missing = set(range(1, n_classes + 1)) - set(int(v) for v in y_train)
    if missing:
        raise ValueError(f"training data has no samples for class(es) {sorted(missing)}")

    mean, std = _standardize_stats(x_train)
    xs = (x_train - mean) / std
    targets = np.zeros((len(y_train), n_classes))
    targets[np.arange(len(y_train)), y_train - 1] = 1.0

    rng = np.random.default_rng(cfg.seed)
    weights = rng.normal(0.0, 0.01, size=(x_train.shape[1], n_classes))
    bias = np.zeros(n_classes)
    model = LinearSoftmaxModel(
        weights=weights,
        bias=bias,
        feature_mean=mean,
        feature_std=std,
        loss_kind=cfg.loss,
        n_classes=n_classes,
        fingerprint=cfg.fingerprint(),
    )

    n = len(xs)
    batches_per_epoch = -(-n // cfg.batch_size)
    total_iterations = max(cfg.epochs * batches_per_epoch, 1)
    schedule = optsched.make_schedule(cfg.schedule, cfg.lr_max, total_iterations)
    if cfg.optimizer == "adamw":
        state = optsched.AdamwState(weight_decay=cfg.weight_decay)
        step = optsched.adamw_step
    else:
        state = optsched.SgdmState(momentum=cfg.momentum, weight_decay=cfg.weight_decay)
        step = optsched.sgdm_step

    log: list[TrainLogRow] = []
    iteration = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for b in range(batches_per_epoch):
            idx = order[b * cfg.batch_size : (b + 1) * cfg.batch_size]
            xb, tb = xs[idx], targets[idx]
            lr = schedule(iteration)
            logits = xb @ model.weights + model.bias
            loss, dz = losses_mod.batch_loss_and_logit_grad(cfg.loss, tb, logits)
            if not np.isfinite(loss):
                raise FloatingPointError(f"training diverged at iteration {iteration}")
            grad_w = xb.T @ dz
            grad_b = dz.sum(axis=0)
            step(state, [model.weights, model.bias], [grad_w, grad_b], lr)
            iteration += 1
            if iteration % cfg.eval_every == 0 or iteration == total_iterations:
                val_acc, val_pm1 = _eval_model(model, x_val, y_val)
                log.append(TrainLogRow(iteration, lr, loss, val_acc, val_pm1))
    return TrainResult(model=model, log=log)


# ---------------------------------------------------------------------------
# model persistence: one-line JSON header + float64 parameter blob


def save_model(model: LinearSoftmaxModel, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": "aepipeline-linear-v1",
        "n_features": int(model.weights.shape[0]),
        "n_classes": int(model.n_classes),
        "loss_kind": model.loss_kind,
        "fingerprint": model.fingerprint,
    }
    blob = np.concatenate(
        [
            model.weights.reshape(-1),
            model.bias,
            model.feature_mean,
            model.feature_std,
        ]
    ).astype("<f8")
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        f.write(blob.tobytes())


def load_model(path) -> LinearSoftmaxModel:
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode())
        blob = np.frombuffer(f.read(), dtype="<f8")
    if header.get("format") != "aepipeline-linear-v1":
        raise ValueError("not a linear model file")
    nf, k = header["n_features"], header["n_classes"]
    expected = nf * k + k + nf + nf
    if len(blob) != expected:
        raise ValueError(f"model blob has {len(blob)} values, expected {expected}")
    weights = blob[: nf * k].reshape(nf, k).copy()
    rest = blob[nf * k :]
    return LinearSoftmaxModel(
        weights=weights,
        bias=rest[:k].copy(),
        feature_mean=rest[k : k + nf].copy(),
        feature_std=rest[k + nf :].copy(),
        loss_kind=header["loss_kind"],
        n_classes=k,
        fingerprint=header.get("fingerprint", ""),
    )
