"""Wavelet denoising of raw stream blocks (db45, universal threshold).

The transform is the standard orthogonal pyramid: convolve with a quadrature
mirror pair and decimate by 2, repeated ``level`` times, with periodic signal
extension.  Signals whose length is not a multiple of ``2^level`` are padded
by periodic repetition up to the next multiple; reconstruction truncates back
to the original length, so perfect reconstruction holds for any input length.

Thresholding is the universal rule with level-dependent rescaling: per
detail level ``j``, ``sigma_j = median(|d_j|)/0.6745`` and
``lambda_j = sigma_j*sqrt(2*ln N_j)`` with ``N_j`` the coefficient count of
that level, applied as soft shrinkage.  Approximation coefficients pass
through untouched.  Level 0 returns the input unchanged.

The db45 lowpass filter (90 taps) is shipped as a data file and validated on
load; see ``tools/make_db45.py`` for how it was produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .ingest import AEStream


@dataclass(frozen=True)
class WaveletFilterPair:
    """Orthonormal lowpass/highpass decomposition pair."""

    lowpass: np.ndarray
    highpass: np.ndarray
    name: str

    def __len__(self) -> int:
        return len(self.lowpass)


def _validate_lowpass(h: np.ndarray, tol: float = 1e-8) -> None:
    if abs(h.sum() - np.sqrt(2)) > tol:
        raise ValueError("lowpass filter does not sum to sqrt(2)")
    if abs(np.dot(h, h) - 1.0) > tol:
        raise ValueError("lowpass filter is not unit-energy")
    for k in range(1, len(h) // 2):
        if abs(np.dot(h[: len(h) - 2 * k], h[2 * k :])) > tol:
            raise ValueError(f"double-shift orthogonality fails at shift {2 * k}")


def quadrature_mirror(h: np.ndarray) -> np.ndarray:
    """Highpass companion ``g[n] = (-1)^n h[L-1-n]``."""
    g = h[::-1].copy()
    g[1::2] *= -1.0
    return g


def load_db45() -> WaveletFilterPair:
    """Load and validate the shipped db45 filter pair."""
    with resources.files("aepipeline.data").joinpath("db45_lowpass.txt").open("r") as f:
        h = np.array([float(line) for line in f if not line.startswith("#")])
    if len(h) != 90:
        raise ValueError(f"expected 90 db45 taps, got {len(h)}")
    _validate_lowpass(h)
    return WaveletFilterPair(lowpass=h, highpass=quadrature_mirror(h), name="db45")


def _periodized(filt: np.ndarray, n: int) -> np.ndarray:
    """Filter taps folded onto a length-n circle."""
    out = np.zeros(n)
    np.add.at(out, np.arange(len(filt)) % n, filt)
    return out


def _analysis_step(x: np.ndarray, filters: WaveletFilterPair):
    n = len(x)
    spec = np.fft.rfft(x)
    h_spec = np.fft.rfft(_periodized(filters.lowpass, n))
    g_spec = np.fft.rfft(_periodized(filters.highpass, n))
    approx = np.fft.irfft(spec * h_spec.conj(), n=n)[::2]
    detail = np.fft.irfft(spec * g_spec.conj(), n=n)[::2]
    return approx, detail


def _synthesis_step(approx: np.ndarray, detail: np.ndarray, filters: WaveletFilterPair):
    n = 2 * len(approx)
    up_a = np.zeros(n)
    up_d = np.zeros(n)
    up_a[::2] = approx
    up_d[::2] = detail
    h_spec = np.fft.rfft(_periodized(filters.lowpass, n))
    g_spec = np.fft.rfft(_periodized(filters.highpass, n))
    return np.fft.irfft(np.fft.rfft(up_a) * h_spec + np.fft.rfft(up_d) * g_spec, n=n)


@dataclass
class CoefficientPyramid:
    """DWT output: detail bands (finest first) and the final approximation."""

    details: list[np.ndarray]
    approx: np.ndarray
    original_length: int

    @property
    def level(self) -> int:
        return len(self.details)


def dwt(signal, filters: WaveletFilterPair, level: int) -> CoefficientPyramid:
    """Decompose ``signal`` to the requested depth.

    Raises if any stage input would be shorter than the filter support,
    which mirrors the usual maximum-useful-depth rule.
    """
    x = np.asarray(signal, dtype=np.float64)
    if level < 1:
        raise ValueError("level must be >= 1")
    if x.ndim != 1:
        raise ValueError("dwt expects a 1-D signal")
    min_len = len(filters) * 2 ** (level - 1)
    if len(x) < min_len:
        raise ValueError(
            f"signal of {len(x)} samples is too short for level {level} "
            f"with a {len(filters)}-tap filter (needs >= {min_len})"
        )
    original = len(x)
    block = 2**level
    padded = -(-original // block) * block
    if padded != original:
        x = np.resize(x, padded)  # periodic extension up to a decimable length

    details: list[np.ndarray] = []
    current = x
    for _ in range(level):
        current, d = _analysis_step(current, filters)
        details.append(d)
    return CoefficientPyramid(details=details, approx=current, original_length=original)


def idwt(pyramid: CoefficientPyramid, filters: WaveletFilterPair) -> np.ndarray:
    """Inverse of :func:`dwt`; exact to rounding for untouched pyramids."""
    current = pyramid.approx
    for d in reversed(pyramid.details):
        current = _synthesis_step(current, d, filters)
    return current[: pyramid.original_length]


@dataclass(frozen=True)
class DenoiseConfig:
    level: int
    block_seconds: float = 1.0
    threshold_rule: str = "universal"
    shrinkage: str = "soft"

    def validate(self) -> None:
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if self.block_seconds <= 0:
            raise ValueError("block_seconds must be positive")
        if self.threshold_rule != "universal" or self.shrinkage != "soft":
            raise ValueError("only universal threshold with soft shrinkage is supported")


def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def denoise_block(block: np.ndarray, filters: WaveletFilterPair, level: int) -> np.ndarray:
    pyramid = dwt(block, filters, level)
    for j, d in enumerate(pyramid.details):
        sigma = np.median(np.abs(d)) / 0.6745
        lam = sigma * np.sqrt(2.0 * np.log(len(d)))
        pyramid.details[j] = soft_threshold(d, lam)
    return idwt(pyramid, filters)


def denoise_stream(
    stream: AEStream, cfg: DenoiseConfig, filters: WaveletFilterPair | None = None
) -> AEStream:
    """Denoise a stream block by block; level 0 is the identity.

    Blocks are ``block_seconds`` long; a short tail is merged into the last
    full block so threshold statistics never run on a sliver.  The output
    manifest records the configuration under ``extra["denoise"]``.
    """
    cfg.validate()
    if cfg.level == 0:
        return stream
    if filters is None:
        filters = load_db45()

    n = stream.manifest.n_samples
    block_len = int(round(cfg.block_seconds * stream.manifest.sample_rate_hz))
    min_len = len(filters) * 2 ** (cfg.level - 1)
    if n < min_len:
        raise ValueError(
            f"stream of {n} samples is shorter than the level-{cfg.level} filter support"
        )
    edges = list(range(0, n, block_len))
    if len(edges) > 1 and n - edges[-1] < min_len:
        edges.pop()  # merge the short tail into the previous block

    x = stream.samples.astype(np.float64)
    out = np.empty_like(x)
    for i, start in enumerate(edges):
        stop = edges[i + 1] if i + 1 < len(edges) else n
        out[start:stop] = denoise_block(x[start:stop], filters, cfg.level)

    return stream.with_samples(
        out.astype(np.float32),
        extra={
            "denoise": {
                "wavelet": filters.name,
                "level": cfg.level,
                "threshold_rule": cfg.threshold_rule,
                "shrinkage": cfg.shrinkage,
                "block_seconds": cfg.block_seconds,
            }
        },
    )
