"""Tiny on-disk image dataset shared by the data/finetune tests."""

from __future__ import annotations

import json

import numpy as np
import pytest
from PIL import Image


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory):
    """16 structured 224x224 PNGs over 7 classes, with train/val manifests."""
    root = tmp_path_factory.mktemp("tiny_imgs")
    (root / "images").mkdir()
    rng = np.random.default_rng(0)
    entries = []
    labels = [1, 2, 3, 4, 5, 6, 7, 1, 2, 3, 4, 5, 6, 7, 1, 2]
    for i, cls in enumerate(labels):
        pixels = rng.integers(0, 40, size=(224, 224, 3), dtype=np.uint8)
        band = slice(28 * (cls - 1), 28 * cls)
        pixels[band, :, 1] = 220  # class-dependent bright band
        rel = f"images/seg{i:06d}.png"
        Image.fromarray(pixels, "RGB").save(root / rel)
        entries.append(
            {"path": rel, "class": cls, "campaign": "A", "sensor": "synthetic-ae",
             "cycle_index": i}
        )
    with open(root / "manifest.jsonl", "w") as f:
        for e in entries:
            f.write(json.dumps(e, sort_keys=True) + "\n")
    with open(root / "train.jsonl", "w") as f:
        for e in entries[:14]:
            f.write(json.dumps(dict(e, dataset=str(root)), sort_keys=True) + "\n")
    with open(root / "val.jsonl", "w") as f:
        for e in entries[14:]:
            f.write(json.dumps(dict(e, dataset=str(root)), sort_keys=True) + "\n")
    return root, entries
