"""Classification losses for ordered classes, with analytic gradients.

Six per-sample losses over a predicted distribution ``p`` and a one-hot
target ``t`` with true class ``c`` (1-based):

- ``cre``    cross entropy, ``-sum_k t_k log p_k``
- ``cdw1``   cross entropy scaled by ``|argmax t - argmax p| / (K-1) + 1``
- ``cdw2``   cross entropy scaled by ``exp(|argmax t - argmax p|)``
- ``cdf``    squared difference of inclusive prefix sums of ``t`` and ``p``
- ``pom1a``  ``-log`` of the probability mass on ``{c-1, c, c+1}``
- ``pom1b``  ``-sum`` of log probabilities over ``{c-1, c, c+1}``

Boundary classes sum over their existing neighbors only.  Probabilities are
clamped to ``[1e-12, 1]`` before any logarithm.  Gradients are analytic with
respect to ``p`` and, through the softmax chain, to logits; the argmax
weight inside the cdw variants is treated as a per-sample constant.
"""

from __future__ import annotations

import numpy as np

LOSS_KINDS = ("cre", "cdw1", "cdw2", "cdf", "pom1a", "pom1b")

PROB_EPS = 1e-12
PROB_SUM_TOL = 1e-6


def one_hot(class_index: int, n_classes: int) -> np.ndarray:
    """One-hot target for a 1-based class index."""
    if not 1 <= class_index <= n_classes:
        raise ValueError(f"class_index {class_index} outside 1..{n_classes}")
    t = np.zeros(n_classes)
    t[class_index - 1] = 1.0
    return t


def _check_pair(t: np.ndarray, p: np.ndarray) -> None:
    if t.shape != p.shape or t.ndim != 1 or len(t) < 2:
        raise ValueError("target and prediction must be 1-D of equal length K >= 2")
    if np.count_nonzero(t == 1.0) != 1 or np.count_nonzero(t) != 1:
        raise ValueError("target must be one-hot")
    if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_SUM_TOL:
        raise ValueError("prediction must be a probability vector")


def _neighborhood(c: int, n_classes: int) -> np.ndarray:
    """0-based indices of {c-1, c, c+1} clipped to the class range (c is 1-based)."""
    return np.array([k - 1 for k in (c - 1, c, c + 1) if 1 <= k <= n_classes])


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def loss_value(kind: str, t, p) -> float:
    """Per-sample loss; see module docstring for the formulas."""
    t = np.asarray(t, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    _check_pair(t, p)
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}")
    k_classes = len(t)
    c = int(np.argmax(t)) + 1
    pc = np.clip(p, PROB_EPS, 1.0)

    if kind == "cre":
        return float(-np.log(pc[c - 1]))
    if kind in ("cdw1", "cdw2"):
        w = abs(int(np.argmax(t)) - int(np.argmax(p)))
        factor = w / (k_classes - 1) + 1.0 if kind == "cdw1" else float(np.exp(w))
        return float(factor * -np.log(pc[c - 1]))
    if kind == "cdf":
        diff = np.cumsum(t) - np.cumsum(p)
        return float(np.dot(diff, diff))
    nb = _neighborhood(c, k_classes)
    if kind == "pom1a":
        return float(-np.log(np.clip(p[nb].sum(), PROB_EPS, None)))
    return float(-np.log(pc[nb]).sum())  # pom1b


def loss_grad(kind: str, t, p) -> tuple[np.ndarray, np.ndarray]:
    """Gradients ``(dL/dp, dL/dlogits)`` with ``p`` read as softmax output."""
    t = np.asarray(t, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    _check_pair(t, p)
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}")
    k_classes = len(t)
    c = int(np.argmax(t)) + 1
    pc = np.clip(p, PROB_EPS, 1.0)
    dp = np.zeros(k_classes)

    if kind == "cre":
        dp[c - 1] = -1.0 / pc[c - 1]
    elif kind in ("cdw1", "cdw2"):
        w = abs(int(np.argmax(t)) - int(np.argmax(p)))
        factor = w / (k_classes - 1) + 1.0 if kind == "cdw1" else float(np.exp(w))
        dp[c - 1] = -factor / pc[c - 1]
    elif kind == "cdf":
        resid = np.cumsum(p) - np.cumsum(t)
        # dL/dp_j = 2 * sum_{k >= j} (cdf(p)_k - cdf(t)_k)
        dp = 2.0 * np.cumsum(resid[::-1])[::-1]
    elif kind == "pom1a":
        nb = _neighborhood(c, k_classes)
        mass = float(np.clip(p[nb].sum(), PROB_EPS, None))
        dp[nb] = -1.0 / mass
    else:  # pom1b
        nb = _neighborhood(c, k_classes)
        dp[nb] = -1.0 / pc[nb]

    # softmax chain: dL/dz_m = p_m * (dp_m - <dp, p>)
    dz = p * (dp - float(np.dot(dp, p)))
    return dp, dz


def batch_loss_and_logit_grad(kind: str, targets: np.ndarray, logits: np.ndarray):
    """Mean loss over a batch and its gradient with respect to the logits.

    ``targets`` is ``[n, K]`` one-hot, ``logits`` ``[n, K]``.  This is the
    entry point the trainer uses; the per-sample functions above stay the
    single source of truth for the formulas.
    """
    probs = softmax(logits)
    n = len(targets)
    total = 0.0
    dz = np.zeros_like(logits)
    for i in range(n):
        total += loss_value(kind, targets[i], probs[i])
        dz[i] = loss_grad(kind, targets[i], probs[i])[1]
    return total / n, dz / n
