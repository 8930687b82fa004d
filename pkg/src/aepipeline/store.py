"""On-disk formats for intermediate pipeline artifacts.

Segments are stored as one concatenated ``segments.f32le`` payload plus a
``segments.json`` index (offsets, labels, provenance), which keeps millions
of small cycles out of the filesystem.  Scalogram datasets are a directory
of PNGs, a ``manifest.jsonl`` with one ``{path, class, campaign, sensor,
cycle_index}`` object per line, and a ``features.npy`` whose row ``i`` holds
the pooled feature vector of manifest line ``i``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .segmentation import CycleSegment

SEGMENT_INDEX = "segments.json"
SEGMENT_PAYLOAD = "segments.f32le"
DATASET_MANIFEST = "manifest.jsonl"
DATASET_FEATURES = "features.npy"


def save_segments(segments: list[CycleSegment], out_dir, sample_rate_hz: float, windowed: bool) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index = {
        "sample_rate_hz": sample_rate_hz,
        "windowed": windowed,
        "segments": [],
    }
    offset = 0
    with open(out / SEGMENT_PAYLOAD, "wb") as payload:
        for seg in segments:
            data = seg.samples.astype("<f4")
            payload.write(data.tobytes())
            index["segments"].append(
                {
                    "offset": offset,
                    "length": int(len(data)),
                    "class": seg.class_index,
                    "campaign": seg.campaign_id,
                    "sensor": seg.sensor_id,
                    "cycle_index": seg.cycle_index,
                    "start_sample": seg.start_sample,
                }
            )
            offset += len(data)
    with open(out / SEGMENT_INDEX, "w", encoding="utf-8") as f:
        json.dump(index, f, indent=2)
        f.write("\n")


def load_segments(in_dir) -> tuple[list[CycleSegment], float, bool]:
    src = Path(in_dir)
    with open(src / SEGMENT_INDEX, encoding="utf-8") as f:
        index = json.load(f)
    payload = np.fromfile(src / SEGMENT_PAYLOAD, dtype="<f4")
    segments = []
    for rec in index["segments"]:
        lo, hi = rec["offset"], rec["offset"] + rec["length"]
        if hi > len(payload):
            raise ValueError("segment index points past the payload")
        segments.append(
            CycleSegment(
                samples=payload[lo:hi],
                class_index=rec["class"],
                campaign_id=rec["campaign"],
                sensor_id=rec["sensor"],
                cycle_index=rec["cycle_index"],
                start_sample=rec["start_sample"],
            )
        )
    return segments, float(index["sample_rate_hz"]), bool(index["windowed"])


def write_jsonl(records: list[dict], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def read_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def load_image_datasets(image_dirs) -> tuple[np.ndarray, np.ndarray, list[dict]]:
    """Pool one or more scalogram dataset directories into memory.

    Returns ``(features, labels, entries)`` where each entry additionally
    carries ``dataset`` (its directory) and ``row`` (its feature row) so a
    subset of entries can always be traced back to feature vectors.
    """
    feats = []
    entries: list[dict] = []
    for d in image_dirs:
        d = Path(d)
        rows = read_jsonl(d / DATASET_MANIFEST)
        block = np.load(d / DATASET_FEATURES)
        if len(rows) != len(block):
            raise ValueError(f"{d}: manifest has {len(rows)} rows, features {len(block)}")
        for i, rec in enumerate(rows):
            entries.append(dict(rec, dataset=str(d), row=i))
        feats.append(block)
    features = np.concatenate(feats, axis=0) if feats else np.empty((0, 0))
    labels = np.array([int(e["class"]) for e in entries], dtype=int)
    return features, labels, entries


def gather_features(entries: list[dict]) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix and label vector for entries from ``load_image_datasets``
    or from split manifests written by ``dataset build``."""
    cache: dict[str, np.ndarray] = {}
    rows = []
    for e in entries:
        d = e["dataset"]
        if d not in cache:
            cache[d] = np.load(Path(d) / DATASET_FEATURES)
        rows.append(cache[d][int(e["row"])])
    labels = np.array([int(e["class"]) for e in entries], dtype=int)
    return np.array(rows), labels
