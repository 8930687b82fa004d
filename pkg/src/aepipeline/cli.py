"""Command-line entry point: the whole pipeline as subcommands.

Every run writes a ``run.json`` fingerprint (resolved config + tool version
+ seed) next to its outputs, so any artifact directory can be reproduced
from the fingerprint alone.  Exit codes: 0 success, 2 usage error (from
argparse), 1 runtime failure with a structured message on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, cwt, denoise, ingest, segmentation, store
from .experiments import (
    ExperimentResult,
    SplitSpec,
    make_split,
    run_experiment,
    summarize,
    write_results_csv,
)
from .metrics import ConfusionMatrix, metrics_report
from .trainer import TrainConfig, featurize, load_model, save_model, train


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("AE_PIPELINE_SEED")
    return int(env) if env else 0


def _write_run_json(out_dir: Path, command: str, config: dict, seed: int | None = None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    clean = {
        k: str(v) if isinstance(v, Path) else v
        for k, v in config.items()
        if k != "func" and not callable(v)
    }
    payload = {
        "command": command,
        "config": clean,
        "seed": seed,
        "version": __version__,
    }
    with open(out_dir / "run.json", "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    with open(args.spec, encoding="utf-8") as f:
        payload = json.load(f)
    if args.seed is not None:
        payload["seed"] = args.seed
    spec = ingest.SyntheticSpec.from_dict(payload)
    vib, ae = ingest.generate_synthetic(spec)
    out = Path(args.out)
    ingest.write_stream(vib, out / "vibro")
    ingest.write_stream(ae, out / spec.sensor_id)
    _write_run_json(out, "synth", {"spec": payload}, spec.seed)
    print(f"wrote {out / 'vibro'}.* and {out / spec.sensor_id}.* ({ae.manifest.n_samples} samples)")
    return 0


# ---------------------------------------------------------------------------
# segment


def cmd_segment(args) -> int:
    ae = ingest.read_stream(args.ae)
    vib = ingest.read_stream(args.vibro)
    segments = segmentation.segment_cycles(ae, vib)
    windowed = not args.no_window
    if windowed:
        segments = [segmentation.apply_hanning(s) for s in segments]
    store.save_segments(segments, args.out, ae.manifest.sample_rate_hz, windowed)
    _write_run_json(Path(args.out), "segment", vars(args))
    print(f"wrote {len(segments)} segments to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# denoise


def cmd_denoise(args) -> int:
    stream = ingest.read_stream(getattr(args, "in"))
    cfg = denoise.DenoiseConfig(level=args.level, block_seconds=args.block_seconds)
    result = denoise.denoise_stream(stream, cfg)
    ingest.write_stream(result, args.out)
    _write_run_json(Path(args.out).parent, "denoise", vars(args))
    print(f"denoised at level {args.level} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# scalogram

_POOL_STATE: dict = {}


def _pool_init(bank, lut, segments):
    _POOL_STATE["bank"] = bank
    _POOL_STATE["lut"] = lut
    _POOL_STATE["segments"] = segments


def _render_one(packed):
    idx, write_images, out_dir = packed
    seg = _POOL_STATE["segments"][idx]
    sg = cwt.cwt(seg.samples, _POOL_STATE["bank"])
    feats = featurize(sg)
    rel_path = f"images/seg{idx:06d}.png"
    if write_images:
        from PIL import Image

        img = cwt.to_image(
            sg,
            lut=_POOL_STATE["lut"],
            label=seg.class_index,
            campaign_id=seg.campaign_id,
            sensor_id=seg.sensor_id,
            cycle_index=seg.cycle_index,
        )
        Image.fromarray(img.pixels).save(Path(out_dir) / rel_path)
    entry = {
        "path": rel_path,
        "class": seg.class_index,
        "campaign": seg.campaign_id,
        "sensor": seg.sensor_id,
        "cycle_index": seg.cycle_index,
    }
    return idx, feats, entry


def build_dataset(
    segments,
    sample_rate_hz: float,
    out_dir,
    voices: int = 12,
    octaves: int = 8,
    literal_filters: int | None = None,
    jobs: int = 1,
    write_images: bool = True,
) -> None:
    """CWT every segment into the dataset layout under ``out_dir``."""
    if not segments:
        raise ValueError("no segments to transform")
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    max_len = max(len(s.samples) for s in segments)
    n_fft = 1 << (max_len - 1).bit_length()
    bank = cwt.build_filter_bank(
        sample_rate_hz,
        n_fft=n_fft,
        voices_per_octave=voices,
        octaves=octaves,
        n_filters_total=literal_filters,
    )
    lut = cwt.load_colormap()
    tasks = [(i, write_images, str(out)) for i in range(len(segments))]
    results: list = [None] * len(segments)
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_pool_init, initargs=(bank, lut, segments)
        ) as pool:
            for idx, feats, entry in pool.map(_render_one, tasks, chunksize=64):
                results[idx] = (feats, entry)
    else:
        _pool_init(bank, lut, segments)
        for task in tasks:
            idx, feats, entry = _render_one(task)
            results[idx] = (feats, entry)
    features = np.array([r[0] for r in results])
    entries = [r[1] for r in results]
    np.save(out / store.DATASET_FEATURES, features)
    store.write_jsonl(entries, out / store.DATASET_MANIFEST)


def cmd_scalogram(args) -> int:
    segments, fs, _ = store.load_segments(args.segments)
    build_dataset(
        segments,
        fs,
        args.out,
        voices=args.voices,
        octaves=args.octaves,
        literal_filters=12 if args.literal_12_filters else None,
        jobs=args.jobs or os.cpu_count() or 1,
        write_images=not args.no_images,
    )
    _write_run_json(Path(args.out), "scalogram", vars(args))
    print(f"wrote {len(segments)} scalograms to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# dataset build


def cmd_dataset(args) -> int:
    seed = _resolve_seed(args.seed)
    _, _, entries = store.load_image_datasets(args.images)
    mode = {"gradual": "gradual_prior"}.get(args.mode, args.mode)
    spec = SplitSpec(
        mode=mode,
        test_campaign=args.test_campaign,
        prior_levels=args.prior_levels,
        sensors=tuple(args.sensors.split(",")) if args.sensors else None,
        seed=seed,
    )
    train_set, val_set, test_set = make_split(entries, spec)
    out = Path(args.out)
    store.write_jsonl(train_set, out / "train.jsonl")
    store.write_jsonl(val_set, out / "val.jsonl")
    store.write_jsonl(test_set, out / "test.jsonl")
    _write_run_json(out, "dataset", vars(args), seed)
    print(f"split sizes: train {len(train_set)}, val {len(val_set)}, test {len(test_set)}")
    return 0


# ---------------------------------------------------------------------------
# train


def cmd_train(args) -> int:
    seed = _resolve_seed(args.seed)
    train_entries = store.read_jsonl(Path(args.data) / "train.jsonl")
    val_entries = store.read_jsonl(Path(args.data) / "val.jsonl")
    x_train, y_train = store.gather_features(train_entries)
    x_val, y_val = store.gather_features(val_entries)
    cfg = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        optimizer=args.optimizer,
        schedule=args.sched,
        lr_max=args.lr_max,
        loss=args.loss,
        seed=seed,
    )
    result = train((x_train, y_train), (x_val, y_val), cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(result.model, out / "model.bin")
    with open(out / "train_log.csv", "w", encoding="utf-8") as f:
        f.write("iteration,lr,train_loss,val_acc,val_acc_pm1\n")
        for row in result.log:
            f.write(
                f"{row.iteration},{row.lr!r},{row.train_loss!r},"
                f"{row.val_acc!r},{row.val_acc_pm1!r}\n"
            )
    _write_run_json(out, "train", vars(args), seed)
    last = result.log[-1] if result.log else None
    if last:
        print(f"final val acc {last.val_acc:.4f}, acc_pm1 {last.val_acc_pm1:.4f}")
    return 0


# ---------------------------------------------------------------------------
# predict


def cmd_predict(args) -> int:
    model = load_model(args.model)
    entries = store.read_jsonl(args.data)
    features, _ = store.gather_features(entries)
    probs = np.atleast_2d(model.predict(features))
    classes = np.argmax(probs, axis=1) + 1
    out = Path(args.out)
    records = [
        dict(
            path=e.get("path", ""),
            **{"class": e.get("class")},
            pred_class=int(classes[i]),
            probs=[float(v) for v in probs[i]],
        )
        for i, e in enumerate(entries)
    ]
    store.write_jsonl(records, out / "predictions.jsonl")
    _write_run_json(out, "predict", vars(args))
    print(f"wrote {len(records)} predictions to {out / 'predictions.jsonl'}")
    return 0


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    model = load_model(args.model)
    test_entries = store.read_jsonl(args.test)
    x_test, y_test = store.gather_features(test_entries)
    cm = ConfusionMatrix(model.n_classes)
    cm.accumulate_arrays(y_test, model.predict_classes(x_test))
    report = metrics_report(cm)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.json", "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    np.savetxt(out / "confusion.csv", cm.m, fmt="%d", delimiter=",")
    _write_run_json(out, "eval", vars(args))
    print(json.dumps({k: report[k] for k in ("acc", "acc_pm1", "f1_pm1")}, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# sweep


def _parse_levels(text: str) -> list[int]:
    """Accept '0:9', '0..9' or '0,1,4,9'."""
    for sep in ("..", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def _train_cfg_from_args(args, seed: int) -> TrainConfig:
    return TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        optimizer=args.optimizer,
        schedule=args.sched,
        lr_max=args.lr_max,
        loss=args.loss,
        seed=seed,
    )


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    out = Path(args.out)
    all_results: list[ExperimentResult] = []
    summaries: list[dict] = []

    if args.levels:
        if not (args.ae and args.vibro):
            raise ValueError("--levels sweep needs --ae and --vibro streams")
        ae = ingest.read_stream(args.ae)
        vib = ingest.read_stream(args.vibro)
        for level in _parse_levels(args.levels):
            stream = denoise.denoise_stream(ae, denoise.DenoiseConfig(level=level))
            segments = [
                segmentation.apply_hanning(s)
                for s in segmentation.segment_cycles(stream, vib)
            ]
            ds_dir = out / f"level{level}"
            build_dataset(
                segments,
                ae.manifest.sample_rate_hz,
                ds_dir,
                voices=args.voices,
                octaves=args.octaves,
                jobs=args.jobs or 1,
                write_images=False,
            )
            features, labels, entries = store.load_image_datasets([ds_dir])
            spec = SplitSpec(mode="noshm", seed=seed)
            results = run_experiment(
                features,
                labels,
                entries,
                spec,
                _train_cfg_from_args(args, seed),
                repeats=args.repeats,
                key={"level": level},
            )
            all_results += results
            summaries.append(summarize(results))
    elif args.sensors:
        if not args.images:
            raise ValueError("--sensors sweep needs --images dataset directories")
        features, labels, entries = store.load_image_datasets(args.images)
        sensor_sets = [(name, (name,)) for name in args.sensors.split(",")]
        sensor_sets.append(("all", tuple(args.sensors.split(","))))
        for name, sensors in sensor_sets:
            spec = SplitSpec(mode="noshm", sensors=sensors, seed=seed)
            results = run_experiment(
                features,
                labels,
                entries,
                spec,
                _train_cfg_from_args(args, seed),
                repeats=args.repeats,
                key={"sensors": name},
            )
            all_results += results
            summaries.append(summarize(results))
    elif args.priors:
        if not (args.images and args.test_campaign):
            raise ValueError("--priors sweep needs --images and --test-campaign")
        features, labels, entries = store.load_image_datasets(args.images)
        for prior in _parse_levels(args.priors):
            spec = SplitSpec(
                mode="gradual_prior",
                test_campaign=args.test_campaign,
                prior_levels=prior,
                seed=seed,
            )
            results = run_experiment(
                features,
                labels,
                entries,
                spec,
                _train_cfg_from_args(args, seed),
                repeats=args.repeats,
                key={"prior_levels": prior},
            )
            all_results += results
            summaries.append(summarize(results))
    else:
        raise ValueError("sweep needs --levels, --sensors or --priors")

    write_results_csv(all_results, summaries, out / "results.csv")
    with open(out / "results.json", "w", encoding="utf-8") as f:
        json.dump(summaries, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_run_json(out, "sweep", vars(args), seed)
    print(f"wrote {len(all_results)} runs, {len(summaries)} summaries to {out}")
    return 0


# ---------------------------------------------------------------------------
# report


def _load_csv(path) -> tuple[list[str], list[list[str]]]:
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as f:
        rows = list(_csv.reader(f))
    return rows[0], rows[1:]


def cmd_report(args) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    made = []

    if args.train_log:
        header, rows = _load_csv(args.train_log)
        cols = {name: i for i, name in enumerate(header)}
        it = [int(r[cols["iteration"]]) for r in rows]
        fig, ax1 = plt.subplots(figsize=(7, 4))
        ax1.plot(it, [float(r[cols["val_acc"]]) for r in rows], label="val acc")
        ax1.plot(it, [float(r[cols["val_acc_pm1"]]) for r in rows], label="val acc +/-1")
        ax1.set_xlabel("iteration")
        ax1.set_ylabel("accuracy")
        ax1.set_ylim(0, 1.02)
        ax1.legend(loc="lower right")
        ax2 = ax1.twinx()
        ax2.plot(it, [float(r[cols["lr"]]) for r in rows], color="gray", alpha=0.5)
        ax2.set_ylabel("learning rate")
        fig.tight_layout()
        fig.savefig(out / "accuracy_vs_iteration.png", dpi=120)
        plt.close(fig)
        made.append("accuracy_vs_iteration.png")

    for arg_name, key, fname in (
        ("sweep", "level", "accuracy_vs_level.png"),
        ("prior", "prior_levels", "accuracy_vs_prior.png"),
    ):
        path = getattr(args, arg_name)
        if not path:
            continue
        header, rows = _load_csv(path)
        cols = {name: i for i, name in enumerate(header)}
        if key not in cols:
            raise ValueError(f"{path} has no {key!r} column")
        summary = [r for r in rows if r[0] == "summary"]
        xs = [float(r[cols[key]]) for r in summary]
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(xs, [float(r[cols["acc"]]) for r in summary], "o-", label="acc")
        ax.plot(xs, [float(r[cols["acc_pm1"]]) for r in summary], "s-", label="acc +/-1")
        ax.set_xlabel(key)
        ax.set_ylabel("accuracy")
        ax.set_ylim(0, 1.02)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out / fname, dpi=120)
        plt.close(fig)
        made.append(fname)
        with open(out / "summary.md", "a", encoding="utf-8") as f:
            f.write(f"## {Path(path).name} by {key}\n\n")
            f.write("| " + " | ".join(header) + " |\n")
            f.write("|" + "---|" * len(header) + "\n")
            for r in summary:
                f.write("| " + " | ".join(r) + " |\n")
            f.write("\n")

    _write_run_json(out, "report", vars(args))
    print(f"rendered: {', '.join(made) if made else 'nothing (no inputs given)'}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aepipeline",
        description="Acoustic-emission streams to scalogram datasets and ordinal classifiers.",
    )
    parser.add_argument("--version", action="version", version=f"aepipeline {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic campaign")
    p.add_argument("--spec", required=True, help="SyntheticSpec JSON file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("segment", help="slice an AE stream into vibration cycles")
    p.add_argument("--ae", required=True)
    p.add_argument("--vibro", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-window", action="store_true", help="skip Hanning apodization")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("denoise", help="wavelet-denoise a raw stream")
    p.add_argument("--in", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--block-seconds", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("scalogram", help="CWT segments into an image dataset")
    p.add_argument("--segments", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--voices", type=int, default=12)
    p.add_argument("--octaves", type=int, default=8)
    p.add_argument("--literal-12-filters", action="store_true",
                   help="use 12 filters total instead of 12 voices per octave")
    p.add_argument("--no-images", action="store_true", help="features only, skip PNGs")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_scalogram)

    p = sub.add_parser("dataset", help="dataset operations")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    b = dsub.add_parser("build", help="build train/val/test split manifests")
    b.add_argument("--images", nargs="+", required=True, help="scalogram dataset dirs")
    b.add_argument("--mode", choices=("noshm", "loco", "gradual"), required=True)
    b.add_argument("--test-campaign", default=None)
    b.add_argument("--prior-levels", type=int, default=0)
    b.add_argument("--sensors", default=None, help="comma-separated sensor filter")
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_dataset)

    def add_train_flags(q):
        q.add_argument("--loss", choices=("cre", "cdw1", "cdw2", "cdf", "pom1a", "pom1b"),
                       default="pom1b")
        q.add_argument("--optimizer", choices=("sgdm", "adamw"), default="adamw")
        q.add_argument("--sched", choices=("onecycle", "constant", "piecewise"),
                       default="onecycle")
        q.add_argument("--lr-max", type=float, default=0.01)
        q.add_argument("--epochs", type=int, default=3)
        q.add_argument("--batch-size", type=int, default=8)
        q.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("train", help="train the reference linear classifier")
    p.add_argument("--data", required=True, help="directory with train/val/test.jsonl")
    p.add_argument("--out", required=True)
    add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a split manifest")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, help="test.jsonl manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="per-sample class distributions for a manifest")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="any split manifest (jsonl)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="denoise-level, sensor-fusion or prior study")
    p.add_argument("--levels", default=None, help="e.g. 0:9 or 0,1,4,9")
    p.add_argument("--sensors", default=None, help="comma-separated sensor ids")
    p.add_argument("--priors", default=None, help="gradual prior levels, e.g. 0:6")
    p.add_argument("--test-campaign", default=None, help="held-out campaign for --priors")
    p.add_argument("--ae", default=None)
    p.add_argument("--vibro", default=None)
    p.add_argument("--images", nargs="*", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--voices", type=int, default=12)
    p.add_argument("--octaves", type=int, default=8)
    p.add_argument("--jobs", type=int, default=None)
    add_train_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="render metric CSVs into tables and plots")
    p.add_argument("--train-log", default=None)
    p.add_argument("--sweep", default=None)
    p.add_argument("--prior", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single structured failure path
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
