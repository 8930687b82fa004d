#!/usr/bin/env python3
"""Regenerate the blue-green-yellow colormap LUT in src/aepipeline/data/.

The LUT is versioned data: scalogram PNGs are only reproducible against a
fixed table, so the anchors below must not change without bumping the name.
"""

import numpy as np

ANCHORS = [
    (0.00, (10, 10, 120)),     # dark blue
    (0.25, (25, 80, 180)),
    (0.50, (30, 155, 115)),    # green
    (0.75, (120, 200, 70)),
    (1.00, (250, 235, 40)),    # yellow
]

OUT = "src/aepipeline/data/bgy256.csv"


def main() -> None:
    pos = np.array([p for p, _ in ANCHORS])
    rgb = np.array([c for _, c in ANCHORS], dtype=float)
    x = np.linspace(0.0, 1.0, 256)
    lut = np.stack([np.interp(x, pos, rgb[:, ch]) for ch in range(3)], axis=1)
    lut = np.clip(np.rint(lut), 0, 255).astype(np.uint8)
    with open(OUT, "w") as f:
        f.write("# bgy256 v1: 256-entry blue->green->yellow LUT, rows are r,g,b\n")
        for r, g, b in lut:
            f.write(f"{r},{g},{b}\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
