#!/usr/bin/env python3
# The analytic Morse filter bank and what the scalogram images look like.
#
# The bank spans 8 octaves below Nyquist with 12 log-spaced filters per
# octave. Each filter is an analytic Morse wavelet with gamma=3 and
# time-bandwidth product 60, peak-normalized to 2 on the frequency grid.
# A pure tone must light up the row whose center frequency matches it; per
# class the synthetic bursts do the same, which is the structure the
# classifier later feeds on.

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aepipeline import cwt, ingest, segmentation

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

FS = 50_000.0
bank = cwt.build_filter_bank(FS, n_fft=512, voices_per_octave=12, octaves=6)
print(f"{bank.n_scales} filters from {bank.center_freqs_hz[0]:.0f} Hz "
      f"down to {bank.center_freqs_hz[-1]:.1f} Hz")

fig, ax = plt.subplots(figsize=(9, 3))
freqs = np.arange(bank.n_fft // 2 + 1) * FS / bank.n_fft
for row in range(0, bank.n_scales, 6):
    ax.plot(freqs / 1000, bank.filters[row, : bank.n_fft // 2 + 1], lw=0.7)
ax.set_xscale("log")
ax.set_xlabel("frequency [kHz]")
ax.set_title("every 6th filter of the Morse bank (peak value 2)")
fig.tight_layout()
fig.savefig(OUT / "03_filterbank.png", dpi=110)

# dial a tone through three octaves: the dominant row must follow it
t = np.arange(bank.n_fft) / FS
for tone in (1000.0, 4000.0, 16000.0):
    sg = cwt.cwt(np.sin(2 * np.pi * tone * t), bank)
    fc = bank.center_freqs_hz[cwt.dominant_row(sg)]
    print(f"tone {tone:7.0f} Hz -> dominant row at {fc:7.0f} Hz")

# per-class average scalogram images on a synthetic campaign
spec = ingest.SyntheticSpec(
    sample_rate_hz=FS,
    class_burst_freqs_hz=tuple(2000.0 * 2 ** (k / 2) for k in range(7)),
    seconds_per_level=0.5,
    seed=3,
    campaign_id="demo",
)
vibro, ae = ingest.generate_synthetic(spec)
segments = [segmentation.apply_hanning(s) for s in segmentation.segment_cycles(ae, vibro)]
lut = cwt.load_colormap()

fig, axes = plt.subplots(1, 7, figsize=(16, 2.6))
for cls in range(1, 8):
    cls_segments = [s for s in segments if s.class_index == cls][:40]
    mean_mag = np.mean(
        [cwt.resize_bilinear(cwt.cwt(s.samples, bank).magnitudes, (224, 224))
         for s in cls_segments],
        axis=0,
    )
    img = cwt.to_image(cwt.Scalogram(mean_mag, bank.center_freqs_hz), lut=lut, label=cls)
    axes[cls - 1].imshow(img.pixels)
    axes[cls - 1].set_title(f"class {cls}")
    axes[cls - 1].axis("off")
fig.suptitle("average scalogram image per tightening class (y: log-frequency, x: cycle time)")
fig.tight_layout()
fig.savefig(OUT / "03_class_scalograms.png", dpi=110)
print(f"wrote {OUT / '03_filterbank.png'} and {OUT / '03_class_scalograms.png'}")
