"""Manifest-driven image loading.

Manifests are JSON lines with at least ``path`` and ``class`` keys. Split
manifests written by ``aepipeline dataset build`` also carry ``dataset``
(the image directory each entry came from), which makes them loadable from
anywhere; plain ``manifest.jsonl`` files resolve paths against
``images_root`` or their own directory.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

IMAGE_SIZE = 224
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


def read_manifest(path) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


class ManifestImageDataset(Dataset):
    """Decoded 224x224x3 images with 0-based class targets.

    Raises itemized errors: a missing or undecodable file reports its full
    path, a wrong-shaped image likewise.
    """

    def __init__(self, manifest_path, images_root=None, imagenet_norm: bool = True):
        self.manifest_path = Path(manifest_path)
        self.entries = read_manifest(self.manifest_path)
        self.images_root = Path(images_root) if images_root else self.manifest_path.parent
        self.imagenet_norm = imagenet_norm
        mean = torch.tensor(IMAGENET_MEAN).view(3, 1, 1)
        std = torch.tensor(IMAGENET_STD).view(3, 1, 1)
        self._mean, self._std = mean, std

    def __len__(self) -> int:
        return len(self.entries)

    def resolve_path(self, entry: dict) -> Path:
        root = Path(entry["dataset"]) if "dataset" in entry else self.images_root
        return root / entry["path"]

    def __getitem__(self, index: int):
        entry = self.entries[index]
        path = self.resolve_path(entry)
        if not path.exists():
            raise FileNotFoundError(f"image listed in manifest is missing: {path}")
        try:
            with Image.open(path) as im:
                rgb = im.convert("RGB")
                pixels = np.asarray(rgb, dtype=np.uint8)
        except Exception as exc:
            raise ValueError(f"cannot decode image {path}: {exc}") from exc
        if pixels.shape != (IMAGE_SIZE, IMAGE_SIZE, 3):
            raise ValueError(f"image {path} has shape {pixels.shape}, expected 224x224x3")
        x = torch.from_numpy(pixels).permute(2, 0, 1).float() / 255.0
        if self.imagenet_norm:
            x = (x - self._mean) / self._std
        label = int(entry["class"])
        return x, label - 1

    def labels(self) -> list[int]:
        return [int(e["class"]) for e in self.entries]

    def class_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for label in self.labels():
            hist[label] = hist.get(label, 0) + 1
        return hist


def load_dataset(manifest_path, images_root=None, imagenet_norm: bool = True) -> ManifestImageDataset:
    return ManifestImageDataset(manifest_path, images_root, imagenet_norm)
