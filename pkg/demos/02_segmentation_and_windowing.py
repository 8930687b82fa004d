#!/usr/bin/env python3
# Slice the AE stream into vibration cycles and apodize them.
#
# Cycle boundaries are the positive-to-negative zero crossings of the
# vibrometer channel: 120 crossings per second at the 120 Hz excitation, so
# ten seconds per level yields ~1200 cycles per tightening class. The
# Hanning window then pushes each cycle's edges to zero so that burst energy
# leaking across the cycle boundary does not smear into the neighbor's
# scalogram.

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aepipeline import ingest, segmentation

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

spec = ingest.SyntheticSpec(
    sample_rate_hz=50_000.0,
    class_burst_freqs_hz=tuple(2000.0 * 2 ** (k / 2) for k in range(7)),
    seconds_per_level=1.0,
    seed=2,
    campaign_id="demo",
)
vibro, ae = ingest.generate_synthetic(spec)

crossings = segmentation.zero_crossings(vibro.samples)
print(f"{len(crossings)} zero crossings "
      f"(expected ~{spec.seconds_per_level * 7 * spec.excitation_hz:.0f})")

segments = segmentation.segment_cycles(ae, vibro)
counts = Counter(s.class_index for s in segments)
print("segments per class:", dict(sorted(counts.items())))

seg = segments[300]
windowed = segmentation.apply_hanning(seg)
t = np.arange(len(seg.samples)) / spec.sample_rate_hz * 1000
fig, axes = plt.subplots(1, 2, figsize=(10, 3), sharey=True)
axes[0].plot(t, seg.samples, lw=0.5)
axes[0].set_title(f"raw cycle (class {seg.class_index})")
axes[0].set_xlabel("time [ms]")
axes[1].plot(t, windowed.samples, lw=0.5)
axes[1].set_title("after Hanning window: endpoints exactly zero")
axes[1].set_xlabel("time [ms]")
fig.tight_layout()
fig.savefig(OUT / "02_windowing.png", dpi=110)
print(f"wrote {OUT / '02_windowing.png'}")
print("windowed endpoints:", windowed.samples[0], windowed.samples[-1])
