"""Fine-tuning loop: AdamW + per-mini-batch 1cycle on a replaced K-class head.

``freeze=True`` trains only the new head; otherwise every parameter is
trainable, which is the configuration that actually generalizes across
campaigns. The training log mirrors the primary CSV schema (iteration, lr,
train_loss, val_acc, val_acc_pm1) so the same report tooling plots both.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader

from .data import ManifestImageDataset, load_dataset
from .losses import LOSS_KINDS, make_loss
from .metrics import confusion_from_predictions, metrics_report
from .models import ARCHITECTURES, build_model, trainable_parameters
from .schedule import one_cycle_lr


@dataclass
class FinetuneConfig:
    architecture: str = "efficientnet_b5"
    freeze: bool = False
    loss: str = "pom1b"
    lr_max: float = 0.01
    weight_decay: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    batch_size: int = 8
    epochs: int = 3
    seed: int = 0
    n_classes: int = 7
    pretrained: bool = True
    imagenet_norm: bool = True
    device: str = "cpu"
    num_workers: int = 0
    eval_every: int | None = None  # default: once per epoch

    def validate(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unsupported architecture {self.architecture!r}")
        if self.loss not in LOSS_KINDS:
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.epochs < 1 or self.batch_size < 1 or self.lr_max <= 0:
            raise ValueError("epochs, batch_size and lr_max must be positive")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LogRow:
    iteration: int
    lr: float
    train_loss: float
    val_acc: float
    val_acc_pm1: float


@dataclass
class FinetuneResult:
    model: torch.nn.Module
    log: list[LogRow] = field(default_factory=list)
    config: dict = field(default_factory=dict)


@torch.no_grad()
def predict_classes(model: torch.nn.Module, dataset, batch_size: int = 32,
                    device: str = "cpu") -> np.ndarray:
    """1-based predicted classes for every dataset item, in manifest order."""
    model.eval()
    loader = DataLoader(dataset, batch_size=batch_size, shuffle=False)
    out = []
    for x, _ in loader:
        logits = model(x.to(device))
        out.append(logits.argmax(dim=-1).cpu().numpy() + 1)
    return np.concatenate(out) if out else np.empty(0, dtype=int)


def _accuracy_pair(truth: np.ndarray, pred: np.ndarray) -> tuple[float, float]:
    n = len(truth)
    exact = float((truth == pred).sum()) / n
    within = float((np.abs(truth - pred) <= 1).sum()) / n
    return exact, within


def finetune(cfg: FinetuneConfig, train_manifest, val_manifest,
             images_root=None) -> FinetuneResult:
    cfg.validate()
    torch.manual_seed(cfg.seed)
    device = torch.device(cfg.device)

    train_set = load_dataset(train_manifest, images_root, cfg.imagenet_norm)
    val_set = load_dataset(val_manifest, images_root, cfg.imagenet_norm)
    val_truth = np.array(val_set.labels())

    model = build_model(cfg.architecture, cfg.n_classes, cfg.pretrained, cfg.freeze).to(device)
    criterion = make_loss(cfg.loss)
    optimizer = torch.optim.AdamW(
        trainable_parameters(model),
        lr=cfg.lr_max / 25.0,
        betas=(cfg.beta1, cfg.beta2),
        weight_decay=cfg.weight_decay,
    )
    generator = torch.Generator().manual_seed(cfg.seed)
    loader = DataLoader(
        train_set,
        batch_size=cfg.batch_size,
        shuffle=True,
        generator=generator,
        num_workers=cfg.num_workers,
    )
    total_iterations = max(cfg.epochs * len(loader), 1)
    eval_every = cfg.eval_every or len(loader)

    log: list[LogRow] = []
    iteration = 0
    for _ in range(cfg.epochs):
        for x, y in loader:
            model.train()
            lr = one_cycle_lr(cfg.lr_max, total_iterations, iteration)
            for group in optimizer.param_groups:
                group["lr"] = lr
            optimizer.zero_grad()
            logits = model(x.to(device))
            loss = criterion(logits, y.to(device))
            if not torch.isfinite(loss):
                raise FloatingPointError(f"training diverged at iteration {iteration}")
            loss.backward()
            optimizer.step()
            iteration += 1
            if iteration % eval_every == 0 or iteration == total_iterations:
                pred = predict_classes(model, val_set, device=cfg.device)
                val_acc, val_pm1 = _accuracy_pair(val_truth, pred)
                log.append(LogRow(iteration, lr, float(loss.item()), val_acc, val_pm1))
    return FinetuneResult(model=model, log=log, config=cfg.to_dict())


def evaluate(model: torch.nn.Module, test_manifest, images_root=None,
             n_classes: int = 7, batch_size: int = 32, device: str = "cpu",
             imagenet_norm: bool = True) -> dict:
    """Metric report with the exact schema and bytes of the primary eval."""
    dataset = load_dataset(test_manifest, images_root, imagenet_norm)
    truth = dataset.labels()
    pred = predict_classes(model, dataset, batch_size=batch_size, device=device)
    matrix = confusion_from_predictions(truth, pred, n_classes)
    return metrics_report(matrix)


def write_log_csv(log: list[LogRow], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["iteration", "lr", "train_loss", "val_acc", "val_acc_pm1"])
        for row in log:
            writer.writerow([row.iteration, repr(row.lr), repr(row.train_loss),
                             repr(row.val_acc), repr(row.val_acc_pm1)])


def save_result(result: FinetuneResult, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(result.model.state_dict(), out / "model.pt")
    write_log_csv(result.log, out / "train_log.csv")
    with open(out / "run.json", "w", encoding="utf-8") as f:
        json.dump({"command": "finetune", "config": result.config}, f, indent=2, sort_keys=True)
        f.write("\n")
