"""Manifest-driven dataset loading: counts, histograms, itemized errors."""

import json

import numpy as np
import pytest
import torch

from aefinetune.data import load_dataset


def test_loads_every_manifest_entry(tiny_dataset):
    root, entries = tiny_dataset
    ds = load_dataset(root / "manifest.jsonl")
    assert len(ds) == len(entries)
    x, y = ds[0]
    assert x.shape == (3, 224, 224)
    assert x.dtype == torch.float32
    assert y == entries[0]["class"] - 1


def test_class_histogram_matches_manifest(tiny_dataset):
    root, entries = tiny_dataset
    ds = load_dataset(root / "manifest.jsonl")
    expected = {}
    for e in entries:
        expected[e["class"]] = expected.get(e["class"], 0) + 1
    assert ds.class_histogram() == expected


def test_split_manifest_resolves_dataset_key(tiny_dataset, tmp_path):
    root, _ = tiny_dataset
    # split manifests carry absolute dataset dirs, so they load from anywhere
    moved = tmp_path / "train_elsewhere.jsonl"
    moved.write_text((root / "train.jsonl").read_text())
    ds = load_dataset(moved)
    assert len(ds) == 14
    x, _ = ds[3]
    assert torch.isfinite(x).all()


def test_missing_image_reports_path(tiny_dataset, tmp_path):
    root, entries = tiny_dataset
    bad = dict(entries[0], path="images/not_there.png")
    manifest = tmp_path / "bad.jsonl"
    manifest.write_text(json.dumps(bad) + "\n")
    ds = load_dataset(manifest, images_root=root)
    with pytest.raises(FileNotFoundError, match="not_there.png"):
        ds[0]


def test_corrupt_image_reports_path(tiny_dataset, tmp_path):
    root, entries = tiny_dataset
    (tmp_path / "images").mkdir()
    (tmp_path / "images" / "junk.png").write_bytes(b"not a png at all")
    bad = dict(entries[0], path="images/junk.png")
    manifest = tmp_path / "bad.jsonl"
    manifest.write_text(json.dumps(bad) + "\n")
    ds = load_dataset(manifest, images_root=tmp_path)
    with pytest.raises(ValueError, match="junk.png"):
        ds[0]


def test_wrong_shape_reports_path(tiny_dataset, tmp_path):
    from PIL import Image

    root, entries = tiny_dataset
    (tmp_path / "images").mkdir()
    small = Image.fromarray(np.zeros((64, 64, 3), dtype=np.uint8), "RGB")
    small.save(tmp_path / "images" / "small.png")
    bad = dict(entries[0], path="images/small.png")
    manifest = tmp_path / "bad.jsonl"
    manifest.write_text(json.dumps(bad) + "\n")
    ds = load_dataset(manifest, images_root=tmp_path)
    with pytest.raises(ValueError, match="small.png"):
        ds[0]


def test_imagenet_normalization_toggle(tiny_dataset):
    root, _ = tiny_dataset
    raw = load_dataset(root / "manifest.jsonl", imagenet_norm=False)
    norm = load_dataset(root / "manifest.jsonl", imagenet_norm=True)
    x_raw, _ = raw[0]
    x_norm, _ = norm[0]
    assert 0.0 <= float(x_raw.min()) and float(x_raw.max()) <= 1.0
    mean = torch.tensor([0.485, 0.456, 0.406]).view(3, 1, 1)
    std = torch.tensor([0.229, 0.224, 0.225]).view(3, 1, 1)
    assert torch.allclose(x_norm, (x_raw - mean) / std, atol=1e-6)
