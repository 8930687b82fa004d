"""1cycle learning-rate schedule and the two optimizer update rules.

The schedule ramps from ``lr_max / div_factor`` up to ``lr_max`` over the
first ``warmup_fraction`` of the iteration budget, then anneals down to
``(lr_max / div_factor) / final_div_factor`` at the last iteration.  Both
legs use cosine interpolation, so the curve is continuous, strictly
positive, and has a single maximum at the warmup boundary.  The trainer
steps it once per mini-batch.

Optimizers are plain numpy: SGD with momentum and AdamW (decoupled weight
decay, applied before the gradient step).  Both mutate the parameter arrays
in place and are deterministic given (state, gradients, learning rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class OneCycleConfig:
    lr_max: float
    total_iterations: int
    div_factor: float = 25.0
    warmup_fraction: float = 0.30
    final_div_factor: float = 1e4

    def validate(self) -> None:
        if self.lr_max <= 0:
            raise ValueError("lr_max must be positive")
        if self.total_iterations < 2:
            raise ValueError("total_iterations must be >= 2")
        if not 0 < self.warmup_fraction < 1:
            raise ValueError("warmup_fraction must be in (0, 1)")
        if self.div_factor <= 0 or self.final_div_factor <= 0:
            raise ValueError("div factors must be positive")


def _cosine(start: float, end: float, u: float) -> float:
    # weighted form hits both endpoints exactly: cos(0)=1, cos(pi)=-1
    w = (1.0 + math.cos(math.pi * u)) / 2.0
    return w * start + (1.0 - w) * end


def lr_at(cfg: OneCycleConfig, iteration: float) -> float:
    """Learning rate at a (possibly fractional) iteration in ``[0, total]``."""
    cfg.validate()
    total = cfg.total_iterations
    if not 0 <= iteration <= total:
        raise ValueError(f"iteration {iteration} outside [0, {total}]")
    lr_start = cfg.lr_max / cfg.div_factor
    lr_final = lr_start / cfg.final_div_factor
    warm_end = cfg.warmup_fraction * total
    if iteration <= warm_end:
        return _cosine(lr_start, cfg.lr_max, iteration / warm_end)
    return _cosine(cfg.lr_max, lr_final, (iteration - warm_end) / (total - warm_end))


def make_schedule(name: str, lr_max: float, total_iterations: int, drop_every: int | None = None):
    """Return ``lr(iteration)`` for one of onecycle / constant / piecewise.

    The piecewise policy multiplies by 0.1 every ``drop_every`` iterations
    (default: a third of the budget), which is the classic step-drop
    baseline the 1cycle runs are compared against.
    """
    if name == "onecycle":
        cfg = OneCycleConfig(lr_max=lr_max, total_iterations=total_iterations)
        return lambda it: lr_at(cfg, it)
    if name == "constant":
        return lambda it: lr_max
    if name == "piecewise":
        period = drop_every or max(total_iterations // 3, 1)
        return lambda it: lr_max * 0.1 ** (int(it) // period)
    raise ValueError(f"unknown schedule {name!r}")


def _check_grads(params: list[np.ndarray], grads: list[np.ndarray]) -> None:
    if len(params) != len(grads):
        raise ValueError("params and grads differ in length")
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ValueError(f"shape mismatch at parameter {i}: {p.shape} vs {g.shape}")
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient at parameter {i}")


@dataclass
class SgdmState:
    momentum: float = 0.9
    weight_decay: float = 0.0
    velocity: list[np.ndarray] = field(default_factory=list)
    step: int = 0


def sgdm_step(state: SgdmState, params: list[np.ndarray], grads: list[np.ndarray], lr: float):
    """``v <- mu*v + g;  theta <- theta - lr*v`` with optional decoupled decay first."""
    _check_grads(params, grads)
    if not state.velocity:
        state.velocity = [np.zeros_like(p) for p in params]
    for p, g, v in zip(params, grads, state.velocity):
        if state.weight_decay:
            p *= 1.0 - lr * state.weight_decay
        v *= state.momentum
        v += g
        p -= lr * v
    state.step += 1
    return params, state


@dataclass
class AdamwState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 5e-4
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    step: int = 0


def adamw_step(state: AdamwState, params: list[np.ndarray], grads: list[np.ndarray], lr: float):
    """Bias-corrected adaptive update with decoupled weight decay."""
    _check_grads(params, grads)
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if state.weight_decay:
            p *= 1.0 - lr * state.weight_decay
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params, state
