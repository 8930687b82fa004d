"""The 1cycle learning-rate policy, per the primary component's contract:
cosine warmup from ``lr_max/25`` to ``lr_max`` over the first 30% of
iterations, then cosine annealing to ``(lr_max/25)/1e4`` at the last one.
"""

from __future__ import annotations

import math

DIV_FACTOR = 25.0
WARMUP_FRACTION = 0.30
FINAL_DIV_FACTOR = 1e4


def _cosine(start: float, end: float, u: float) -> float:
    w = (1.0 + math.cos(math.pi * u)) / 2.0
    return w * start + (1.0 - w) * end


def one_cycle_lr(lr_max: float, total_iterations: int, iteration: float) -> float:
    if not 0 <= iteration <= total_iterations:
        raise ValueError(f"iteration {iteration} outside [0, {total_iterations}]")
    lr_start = lr_max / DIV_FACTOR
    lr_final = lr_start / FINAL_DIV_FACTOR
    warm_end = WARMUP_FRACTION * total_iterations
    if iteration <= warm_end:
        return _cosine(lr_start, lr_max, iteration / warm_end)
    return _cosine(lr_max, lr_final, (iteration - warm_end) / (total_iterations - warm_end))
