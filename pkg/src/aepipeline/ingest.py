"""Raw acoustic-emission stream container and synthetic campaign generator.

A stream on disk is a pair of files sharing a base path: ``<base>.json``
(the manifest) and ``<base>.f32le`` (raw little-endian 32-bit floats, volts).
The manifest carries the campaign/sensor identity, the sampling rate and the
torque-class schedule as sample intervals.  See README for the converter
contract that maps externally acquired data into this format.

Synthetic campaigns exist so the whole pipeline can be exercised at desk
scale: a clean excitation sine stands in for the laser vibrometer and the AE
channel is built from per-cycle damped bursts, buried in Gaussian noise at a
controlled peak-to-peak SNR.  Classes differ by burst carrier frequency,
strictly monotone in class index, so the ordinal structure is real.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ENCODING_TAG = "f32le-v1"

#: torque in cNm for class indices 1..7
TORQUE_CNM = (60, 50, 40, 30, 20, 10, 5)


class StreamFormatError(ValueError):
    """A stream pair on disk violates the container contract."""


@dataclass(frozen=True)
class StreamManifest:
    """Sidecar metadata for one sensor channel of raw samples.

    ``torque_schedule`` is an ordered tuple of ``(class_index, start, end)``
    half-open sample intervals; intervals must be disjoint, ascending and
    within ``[0, n_samples)``.  ``extra`` holds free-form provenance (e.g.
    denoising parameters) and round-trips through JSON untouched.
    """

    campaign_id: str
    sensor_id: str
    sample_rate_hz: float
    n_samples: int
    torque_schedule: tuple[tuple[int, int, int], ...] = ()
    n_classes: int = 7
    encoding: str = ENCODING_TAG
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.encoding != ENCODING_TAG:
            raise StreamFormatError(f"unknown encoding tag {self.encoding!r}")
        if not self.sample_rate_hz > 0:
            raise StreamFormatError("sample_rate_hz must be positive")
        if self.n_samples < 0:
            raise StreamFormatError("n_samples must be non-negative")
        if self.n_classes < 1:
            raise StreamFormatError("n_classes must be >= 1")
        prev_end = 0
        for cls, start, end in self.torque_schedule:
            if not 1 <= cls <= self.n_classes:
                raise StreamFormatError(f"class_index {cls} outside 1..{self.n_classes}")
            if start < prev_end or end <= start or end > self.n_samples:
                raise StreamFormatError(
                    f"torque interval ({cls},{start},{end}) overlaps, is empty "
                    f"or exceeds [0,{self.n_samples})"
                )
            prev_end = end

    def class_at(self, sample_index: int) -> int | None:
        """Class of the interval containing ``sample_index``, else None."""
        for cls, start, end in self.torque_schedule:
            if start <= sample_index < end:
                return cls
        return None

    def to_dict(self) -> dict:
        return {
            "campaign_id": self.campaign_id,
            "sensor_id": self.sensor_id,
            "sample_rate_hz": self.sample_rate_hz,
            "n_samples": self.n_samples,
            "torque_schedule": [list(iv) for iv in self.torque_schedule],
            "n_classes": self.n_classes,
            "encoding": self.encoding,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StreamManifest":
        m = cls(
            campaign_id=str(d["campaign_id"]),
            sensor_id=str(d["sensor_id"]),
            sample_rate_hz=float(d["sample_rate_hz"]),
            n_samples=int(d["n_samples"]),
            torque_schedule=tuple(tuple(int(v) for v in iv) for iv in d.get("torque_schedule", [])),
            n_classes=int(d.get("n_classes", 7)),
            encoding=str(d.get("encoding", ENCODING_TAG)),
            extra=dict(d.get("extra", {})),
        )
        m.validate()
        return m


@dataclass(frozen=True)
class AEStream:
    """One channel of raw samples plus its manifest. Immutable once built."""

    manifest: StreamManifest
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float32))
        self.manifest.validate()
        if len(self.samples) != self.manifest.n_samples:
            raise StreamFormatError(
                f"manifest says {self.manifest.n_samples} samples, "
                f"payload has {len(self.samples)}"
            )
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            raise StreamFormatError("stream contains non-finite samples")

    @property
    def sample_rate_hz(self) -> float:
        return self.manifest.sample_rate_hz

    def with_samples(self, samples: np.ndarray, extra: dict | None = None) -> "AEStream":
        """Copy of this stream with replaced payload (and merged extra metadata)."""
        man = self.manifest.to_dict()
        man["n_samples"] = int(len(samples))
        if extra:
            man["extra"] = {**man["extra"], **extra}
        return AEStream(StreamManifest.from_dict(man), samples)


def _base_path(path) -> Path:
    p = Path(path)
    if p.suffix in (".json", ".f32le"):
        p = p.with_suffix("")
    return p


def write_stream(stream: AEStream, path) -> None:
    """Write ``<path>.json`` + ``<path>.f32le``; round-trips bit-exactly."""
    base = _base_path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    with open(base.with_suffix(".json"), "w", encoding="utf-8") as f:
        json.dump(stream.manifest.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    stream.samples.astype("<f4").tofile(base.with_suffix(".f32le"))


def read_stream(path) -> AEStream:
    """Read and validate a stream pair written by :func:`write_stream`."""
    base = _base_path(path)
    man_path, pay_path = base.with_suffix(".json"), base.with_suffix(".f32le")
    if not man_path.exists():
        raise FileNotFoundError(man_path)
    if not pay_path.exists():
        raise FileNotFoundError(pay_path)
    with open(man_path, encoding="utf-8") as f:
        manifest = StreamManifest.from_dict(json.load(f))
    samples = np.fromfile(pay_path, dtype="<f4")
    return AEStream(manifest, samples)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a deterministic synthetic campaign.

    ``class_burst_freqs_hz`` must be strictly monotone so that adjacent
    classes stay spectrally adjacent (the ordinal structure the losses and
    +/-1 metrics are about).  Everything, including noise, derives from
    ``seed``.
    """

    sample_rate_hz: float
    class_burst_freqs_hz: tuple[float, ...]
    excitation_hz: float = 120.0
    seconds_per_level: float = 10.0
    n_levels: int = 7
    snr_db: float = 2.3
    bursts_per_cycle: int = 3
    seed: int = 0
    campaign_id: str = "synthetic"
    sensor_id: str = "synthetic-ae"

    def validate(self) -> None:
        if self.sample_rate_hz <= 0 or self.seconds_per_level <= 0:
            raise ValueError("rates and durations must be positive")
        if self.n_levels < 1 or len(self.class_burst_freqs_hz) != self.n_levels:
            raise ValueError("need one burst frequency per level")
        diffs = np.diff(self.class_burst_freqs_hz)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("class_burst_freqs_hz must be strictly monotone")
        nyquist = self.sample_rate_hz / 2
        if self.excitation_hz >= nyquist or max(self.class_burst_freqs_hz) >= nyquist:
            raise ValueError("all frequencies must be below Nyquist")
        if self.bursts_per_cycle < 1:
            raise ValueError("bursts_per_cycle must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        spec = cls(
            sample_rate_hz=float(d["sample_rate_hz"]),
            class_burst_freqs_hz=tuple(float(f) for f in d["class_burst_freqs_hz"]),
            excitation_hz=float(d.get("excitation_hz", 120.0)),
            seconds_per_level=float(d.get("seconds_per_level", 10.0)),
            n_levels=int(d.get("n_levels", 7)),
            snr_db=float(d.get("snr_db", 2.3)),
            bursts_per_cycle=int(d.get("bursts_per_cycle", 3)),
            seed=int(d.get("seed", 0)),
            campaign_id=str(d.get("campaign_id", "synthetic")),
            sensor_id=str(d.get("sensor_id", "synthetic-ae")),
        )
        spec.validate()
        return spec


def generate_synthetic(spec: SyntheticSpec, return_parts: bool = False):
    """Build the (vibrometer, ae) stream pair for a synthetic campaign.

    The vibrometer channel is a clean sine at the excitation frequency.  The
    AE channel holds, per vibration cycle, ``bursts_per_cycle`` exponentially
    damped sinusoids at the level's carrier frequency, plus white Gaussian
    noise scaled so that ``20*log10(pp_signal/pp_noise)`` equals ``snr_db``
    (peak-to-peak convention).  With ``return_parts=True`` the clean and
    noise components are returned as a third element for SNR auditing.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    fs = spec.sample_rate_hz
    n_level = int(round(spec.seconds_per_level * fs))
    n_total = n_level * spec.n_levels

    t = np.arange(n_total) / fs
    vibro = np.sin(2 * np.pi * spec.excitation_hz * t).astype(np.float32)

    cycle_len = fs / spec.excitation_hz
    tau = 0.08 * cycle_len / fs  # burst decay constant, seconds
    clean = np.zeros(n_total)
    for level in range(spec.n_levels):
        f_burst = spec.class_burst_freqs_hz[level]
        lvl_start = level * n_level
        n_cycles = int(math.floor(n_level / cycle_len))
        for c in range(n_cycles):
            c_start = lvl_start + int(round(c * cycle_len))
            offsets = rng.uniform(0.05, 0.60, size=spec.bursts_per_cycle)
            amps = rng.lognormal(mean=0.0, sigma=0.2, size=spec.bursts_per_cycle)
            for off, amp in zip(offsets, amps):
                b0 = c_start + int(round(off * cycle_len))
                b1 = min(lvl_start + (c + 1) * int(round(cycle_len)), n_total)
                if b1 <= b0:
                    continue
                tb = np.arange(b1 - b0) / fs
                clean[b0:b1] += amp * np.exp(-tb / tau) * np.sin(2 * np.pi * f_burst * tb)

    noise = rng.standard_normal(n_total)
    pp_clean = float(clean.max() - clean.min())
    pp_noise = float(noise.max() - noise.min())
    scale = pp_clean / (pp_noise * 10 ** (spec.snr_db / 20))
    noise *= scale

    schedule = tuple(
        (level + 1, level * n_level, (level + 1) * n_level) for level in range(spec.n_levels)
    )
    vib_manifest = StreamManifest(
        campaign_id=spec.campaign_id,
        sensor_id="vibrometer",
        sample_rate_hz=fs,
        n_samples=n_total,
        torque_schedule=schedule,
        n_classes=spec.n_levels,
    )
    ae_manifest = StreamManifest(
        campaign_id=spec.campaign_id,
        sensor_id=spec.sensor_id,
        sample_rate_hz=fs,
        n_samples=n_total,
        torque_schedule=schedule,
        n_classes=spec.n_levels,
    )
    ae = AEStream(ae_manifest, (clean + noise).astype(np.float32))
    vib = AEStream(vib_manifest, vibro)
    if return_parts:
        return vib, ae, {"clean": clean, "noise": noise}
    return vib, ae
