#!/usr/bin/env python3
# The six losses on a sliding prediction, and the 1cycle schedule.
#
# Take K=7, true class 4, and a prediction that concentrates 70% mass on a
# single class c while spreading the rest uniformly. Sweeping c across the
# classes shows each loss's character: cre punishes every miss equally,
# the cdw variants scale with class distance, cdf accumulates squared
# prefix-sum gaps, and the pom1 pair stays low while the mass lands within
# one class of the truth.

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aepipeline import losses, optsched

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

K = 7
t = losses.one_hot(4, K)
fig, ax = plt.subplots(figsize=(8, 4))
for kind in losses.LOSS_KINDS:
    values = []
    for c in range(1, K + 1):
        p = np.full(K, 0.3 / (K - 1))
        p[c - 1] = 0.7
        values.append(losses.loss_value(kind, t, p))
    ax.plot(range(1, K + 1), values, "o-", label=kind)
    print(f"{kind:6s}:", " ".join(f"{v:6.3f}" for v in values))
ax.set_xlabel("class holding 70% of the predicted mass (truth = 4)")
ax.set_ylabel("per-sample loss")
ax.legend(ncol=3)
fig.tight_layout()
fig.savefig(OUT / "05_losses.png", dpi=110)

cfg = optsched.OneCycleConfig(lr_max=0.01, total_iterations=3000)
grid = np.arange(0, 3001)
lrs = [optsched.lr_at(cfg, g) for g in grid]
fig, ax = plt.subplots(figsize=(7, 3))
ax.plot(grid, lrs)
ax.axvline(0.3 * 3000, color="gray", ls="--", lw=0.8)
ax.set_xlabel("iteration")
ax.set_ylabel("learning rate")
ax.set_title("1cycle: warm up to lr_max over 30%, cosine anneal to lr_max/25/1e4")
fig.tight_layout()
fig.savefig(OUT / "05_schedule.png", dpi=110)
print(f"lr(0) = {lrs[0]:.2e}, lr(900) = {lrs[900]:.2e}, lr(3000) = {lrs[-1]:.2e}")
print(f"wrote {OUT / '05_losses.png'} and {OUT / '05_schedule.png'}")
