"""Slice an AE stream into per-vibration-cycle segments.

Cycle boundaries come from positive-to-negative zero crossings of the
vibrometer channel; each consecutive crossing pair yields one segment of the
AE channel, labeled from the torque schedule.  Segments keep their native
length (roughly ``fs / excitation_hz`` samples); time normalization happens
later, in the scalogram image resize.  A Hanning window is applied after
segmentation and before imaging, never the other way round, because the
denoiser operates on raw one-second stream blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ingest import AEStream


@dataclass(frozen=True)
class CycleSegment:
    """One vibration cycle of AE samples with label and provenance."""

    samples: np.ndarray
    class_index: int
    campaign_id: str
    sensor_id: str
    cycle_index: int
    start_sample: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if len(self.samples) < 2:
            raise ValueError("segment needs at least 2 samples")


def zero_crossings(signal) -> np.ndarray:
    """Indices ``i`` with ``signal[i-1] > 0`` and ``signal[i] <= 0``, ascending.

    Ties (exact zeros) count as crossed, which makes the detector
    deterministic on synthetic sines that sample the zero exactly.
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.size and not np.all(np.isfinite(s)):
        raise ValueError("signal contains non-finite samples")
    if len(s) < 2:
        return np.empty(0, dtype=np.int64)
    return np.nonzero((s[:-1] > 0) & (s[1:] <= 0))[0].astype(np.int64) + 1


def segment_cycles(ae: AEStream, vibro: AEStream) -> list[CycleSegment]:
    """One segment per consecutive crossing pair ``[c_j, c_{j+1})``.

    Partial head/tail cycles are discarded, as are segments that straddle a
    torque-interval boundary (dropping beats mixing labels).  Output is
    ordered by ``start_sample``; fewer than two crossings yields an empty
    list, not an error.
    """
    if ae.manifest.n_samples != vibro.manifest.n_samples:
        raise ValueError("ae and vibrometer streams differ in length")
    if ae.manifest.sample_rate_hz != vibro.manifest.sample_rate_hz:
        raise ValueError("ae and vibrometer streams differ in sample rate")

    crossings = zero_crossings(vibro.samples)
    schedule = ae.manifest.torque_schedule
    segments: list[CycleSegment] = []
    for j in range(len(crossings) - 1):
        c0, c1 = int(crossings[j]), int(crossings[j + 1])
        label = None
        for cls, start, end in schedule:
            if start <= c0 and c1 <= end:
                label = cls
                break
        if label is None:
            continue
        segments.append(
            CycleSegment(
                samples=ae.samples[c0:c1],
                class_index=label,
                campaign_id=ae.manifest.campaign_id,
                sensor_id=ae.manifest.sensor_id,
                cycle_index=j,
                start_sample=c0,
            )
        )
    return segments


def apply_hanning(segment: CycleSegment) -> CycleSegment:
    """Multiply by ``0.5*(1 - cos(2*pi*n/(N-1)))``; endpoints become exactly 0."""
    n = len(segment.samples)
    if n < 2:
        raise ValueError("segment too short to window")
    return replace(segment, samples=segment.samples * np.hanning(n))
