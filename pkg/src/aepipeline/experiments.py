"""Dataset splits and experiment harnesses.

Three split modes cover the evaluation protocols:

- ``noshm``          stratified 80/10/10 random split, everything mixed
- ``loco``           leave-one-campaign-out: the test campaign is unseen,
                     the remaining campaigns split 80/20 into train/val
- ``gradual_prior``  loco, then the first ``prior_levels`` classes of the
                     test campaign (in tightening order, never the loosest
                     class) move into train/val

Entries are plain dicts with at least ``class`` and ``campaign`` keys, which
is exactly what the JSONL dataset manifests contain, so splits operate
directly on manifest rows.  All randomness is seeded and stratified by
class.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .metrics import ConfusionMatrix, metrics_report
from .trainer import TrainConfig, TrainResult, train

SPLIT_MODES = ("noshm", "loco", "gradual_prior")


@dataclass(frozen=True)
class SplitSpec:
    mode: str
    test_campaign: str | None = None
    prior_levels: int = 0
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    sensors: tuple[str, ...] | None = None
    seed: int = 0
    n_classes: int = 7

    def validate(self) -> None:
        if self.mode not in SPLIT_MODES:
            raise ValueError(f"unknown split mode {self.mode!r}")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError("fractions must sum to 1")
        if self.mode in ("loco", "gradual_prior") and not self.test_campaign:
            raise ValueError(f"{self.mode} requires a test_campaign")
        if not 0 <= self.prior_levels <= self.n_classes - 1:
            raise ValueError(f"prior_levels must lie in 0..{self.n_classes - 1}")


def _filter_sensors(entries: list[dict], spec: SplitSpec) -> list[dict]:
    if spec.sensors is None:
        return list(entries)
    allowed = set(spec.sensors)
    return [e for e in entries if e["sensor"] in allowed]


def _stratified_shuffle(entries: list[dict], rng: np.random.Generator) -> dict[int, list[dict]]:
    by_class: dict[int, list[dict]] = {}
    for e in entries:
        by_class.setdefault(int(e["class"]), []).append(e)
    for cls in by_class:
        order = rng.permutation(len(by_class[cls]))
        by_class[cls] = [by_class[cls][i] for i in order]
    return by_class


def split_noshm(entries: list[dict], spec: SplitSpec):
    """Stratified-by-class random split at the configured fractions."""
    spec.validate()
    pool = _filter_sensors(entries, spec)
    rng = np.random.default_rng(spec.seed)
    train_set: list[dict] = []
    val_set: list[dict] = []
    test_set: list[dict] = []
    for cls, items in sorted(_stratified_shuffle(pool, rng).items()):
        if len(items) < 3:
            raise ValueError(f"class {cls} has {len(items)} item(s); need >= 3 to split")
        n = len(items)
        n_val = int(round(spec.fractions[1] * n))
        n_test = int(round(spec.fractions[2] * n))
        test_set += items[:n_test]
        val_set += items[n_test : n_test + n_val]
        train_set += items[n_test + n_val :]
    return train_set, val_set, test_set


def _split_train_val(pool: list[dict], rng: np.random.Generator, train_fraction: float = 0.8):
    train_set: list[dict] = []
    val_set: list[dict] = []
    by_class = _stratified_shuffle(pool, rng)
    for _, items in sorted(by_class.items()):
        n_train = int(round(train_fraction * len(items)))
        train_set += items[:n_train]
        val_set += items[n_train:]
    return train_set, val_set


def split_loco(entries: list[dict], spec: SplitSpec):
    """Leave-one-campaign-out: test on the held-out campaign only."""
    spec.validate()
    pool = _filter_sensors(entries, spec)
    campaigns = sorted({e["campaign"] for e in pool})
    if len(campaigns) < 2:
        raise ValueError("leave-one-campaign-out needs at least 2 campaigns")
    if spec.test_campaign not in campaigns:
        raise ValueError(f"unknown campaign {spec.test_campaign!r}; have {campaigns}")
    test_set = [e for e in pool if e["campaign"] == spec.test_campaign]
    rest = [e for e in pool if e["campaign"] != spec.test_campaign]
    rng = np.random.default_rng(spec.seed)
    train_set, val_set = _split_train_val(rest, rng)
    return train_set, val_set, test_set


def split_gradual_prior(entries: list[dict], spec: SplitSpec):
    """loco plus labeled prior classes of the test campaign moved into training.

    Priors are added in tightening order (class 1 first); the last class --
    the loosest level -- always stays in the test set, so even the most
    supervised configuration keeps something unseen.
    """
    spec.validate()
    train_set, val_set, test_set = split_loco(entries, spec)
    if spec.prior_levels == 0:
        return train_set, val_set, test_set
    prior_classes = set(range(1, spec.prior_levels + 1))
    moved = [e for e in test_set if int(e["class"]) in prior_classes]
    kept = [e for e in test_set if int(e["class"]) not in prior_classes]
    rng = np.random.default_rng(spec.seed + 1)  # independent of the loco shuffle
    extra_train, extra_val = _split_train_val(moved, rng)
    return train_set + extra_train, val_set + extra_val, kept


def make_split(entries: list[dict], spec: SplitSpec):
    if spec.mode == "noshm":
        return split_noshm(entries, spec)
    if spec.mode == "loco":
        return split_loco(entries, spec)
    return split_gradual_prior(entries, spec)


# ---------------------------------------------------------------------------
# experiment harness


@dataclass
class ExperimentResult:
    seed: int
    acc: float
    acc_pm1: float
    recall_pm1: float
    precision_pm1: float
    f1_pm1: float
    wall_time_s: float
    config_fingerprint: str
    key: dict = field(default_factory=dict)  # sweep coordinates (level, sensor, ...)


def evaluate_on(result: TrainResult, x_test: np.ndarray, y_test: np.ndarray) -> dict:
    cm = ConfusionMatrix(result.model.n_classes)
    cm.accumulate_arrays(y_test, result.model.predict_classes(x_test))
    return metrics_report(cm)


def run_experiment(
    features: np.ndarray,
    labels: np.ndarray,
    entries: list[dict],
    split_spec: SplitSpec,
    train_cfg: TrainConfig,
    repeats: int = 1,
    key: dict | None = None,
) -> list[ExperimentResult]:
    """Train/evaluate ``repeats`` times, reseeding both split and trainer.

    ``entries[i]`` describes ``features[i]`` / ``labels[i]``; each repeat r
    derives its seeds as ``seed + r`` so runs are independent but exactly
    reproducible.  Returns one result per repeat, in seed order.
    """
    if not (len(features) == len(labels) == len(entries)):
        raise ValueError("features, labels and entries must align")
    indexed = [dict(e, _row=i) for i, e in enumerate(entries)]
    results: list[ExperimentResult] = []
    for r in range(repeats):
        spec_r = SplitSpec(
            mode=split_spec.mode,
            test_campaign=split_spec.test_campaign,
            prior_levels=split_spec.prior_levels,
            fractions=split_spec.fractions,
            sensors=split_spec.sensors,
            seed=split_spec.seed + r,
            n_classes=split_spec.n_classes,
        )
        tr, va, te = make_split(indexed, spec_r)
        rows = lambda part: np.array([e["_row"] for e in part], dtype=int)
        cfg_r = TrainConfig(**{**train_cfg.__dict__, "seed": train_cfg.seed + r})
        t0 = time.perf_counter()
        fit = train(
            (features[rows(tr)], labels[rows(tr)]),
            (features[rows(va)], labels[rows(va)]),
            cfg_r,
            n_classes=split_spec.n_classes,
        )
        report = evaluate_on(fit, features[rows(te)], labels[rows(te)])
        results.append(
            ExperimentResult(
                seed=cfg_r.seed,
                acc=report["acc"],
                acc_pm1=report["acc_pm1"],
                recall_pm1=report["recall_pm1_mean"],
                precision_pm1=report["precision_pm1_mean"],
                f1_pm1=report["f1_pm1"],
                wall_time_s=time.perf_counter() - t0,
                config_fingerprint=cfg_r.fingerprint(),
                key=dict(key or {}),
            )
        )
    return results


def summarize(results: list[ExperimentResult]) -> dict:
    """Mean and standard deviation over repeats for each metric."""
    if not results:
        raise ValueError("no results to summarize")
    out: dict = {"n_runs": len(results), "key": results[0].key}
    for name in ("acc", "acc_pm1", "recall_pm1", "precision_pm1", "f1_pm1"):
        vals = np.array([getattr(r, name) for r in results])
        out[f"{name}_mean"] = float(vals.mean())
        out[f"{name}_std"] = float(vals.std())
    return out


RESULT_FIELDS = (
    "seed",
    "acc",
    "acc_pm1",
    "recall_pm1",
    "precision_pm1",
    "f1_pm1",
    "wall_time_s",
    "config_fingerprint",
)


def write_results_csv(results: list[ExperimentResult], summaries: list[dict], path) -> None:
    """One row per run plus one ``summary`` row per sweep key."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    key_names = sorted({k for r in results for k in r.key})
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["kind", *key_names, *RESULT_FIELDS])
        for r in results:
            writer.writerow(
                ["run", *(r.key.get(k, "") for k in key_names)]
                + [getattr(r, fieldname) for fieldname in RESULT_FIELDS]
            )
        for s in summaries:
            writer.writerow(
                ["summary", *(s["key"].get(k, "") for k in key_names)]
                + [
                    s["n_runs"],
                    s["acc_mean"],
                    s["acc_pm1_mean"],
                    s["recall_pm1_mean"],
                    s["precision_pm1_mean"],
                    s["f1_pm1_mean"],
                    "",
                    "",
                ]
            )


def config_fingerprint(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]
