#!/usr/bin/env python3
# End to end at desk scale: three campaigns, leave one out, train, evaluate.
#
# Campaigns differ only by seed (fresh noise and burst placement), so the
# held-out campaign probes generalization the same way an unseen structure
# would. The linear model on pooled scalogram features trains in seconds
# with the 1cycle schedule and pom1b; the +/-1 metrics then quantify how
# ordinal the surviving errors are.

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aepipeline import cwt, ingest, metrics, segmentation, trainer
from aepipeline.experiments import SplitSpec, make_split

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

FS = 50_000.0
segments = []
for campaign, seed in (("A", 11), ("B", 22), ("C", 33)):
    spec = ingest.SyntheticSpec(
        sample_rate_hz=FS,
        class_burst_freqs_hz=tuple(2000.0 * 2 ** (k / 2) for k in range(7)),
        seconds_per_level=1.0,
        snr_db=2.3,
        seed=seed,
        campaign_id=campaign,
    )
    vibro, ae = ingest.generate_synthetic(spec)
    segments += [segmentation.apply_hanning(s) for s in segmentation.segment_cycles(ae, vibro)]
print(f"{len(segments)} segments over 3 campaigns")

max_len = max(len(s.samples) for s in segments)
bank = cwt.build_filter_bank(FS, n_fft=1 << (max_len - 1).bit_length(), octaves=6)
features = np.array([trainer.featurize(cwt.cwt(s.samples, bank)) for s in segments])
labels = np.array([s.class_index for s in segments])
entries = [
    {"class": s.class_index, "campaign": s.campaign_id, "sensor": s.sensor_id, "_row": i}
    for i, s in enumerate(segments)
]

split = SplitSpec(mode="loco", test_campaign="C", seed=0)
train_set, val_set, test_set = make_split(entries, split)
rows = lambda part: np.array([e["_row"] for e in part], dtype=int)
print(f"loco split: train {len(train_set)}, val {len(val_set)}, test {len(test_set)} (campaign C)")

cfg = trainer.TrainConfig(epochs=3, batch_size=8, loss="pom1b", lr_max=0.01, seed=0)
result = trainer.train(
    (features[rows(train_set)], labels[rows(train_set)]),
    (features[rows(val_set)], labels[rows(val_set)]),
    cfg,
)

cm = metrics.ConfusionMatrix(7)
cm.accumulate_arrays(labels[rows(test_set)], result.model.predict_classes(features[rows(test_set)]))
report = metrics.metrics_report(cm)
print("held-out campaign:", {k: round(v, 4) for k, v in report.items() if isinstance(v, float)})
print("confusion matrix:")
print(cm.m)

iters = [r.iteration for r in result.log]
fig, ax1 = plt.subplots(figsize=(8, 4))
ax1.plot(iters, [r.val_acc for r in result.log], label="val acc")
ax1.plot(iters, [r.val_acc_pm1 for r in result.log], label="val acc +/-1")
ax1.set_xlabel("iteration")
ax1.set_ylabel("accuracy")
ax1.legend(loc="lower right")
ax2 = ax1.twinx()
ax2.plot(iters, [r.lr for r in result.log], color="gray", alpha=0.5)
ax2.set_ylabel("learning rate")
fig.tight_layout()
fig.savefig(OUT / "06_learning_curve.png", dpi=110)
print(f"wrote {OUT / '06_learning_curve.png'}")
