"""Analytic Morse-wavelet transform and scalogram image export.

The filter bank holds frequency-domain analytic wavelets
``psi(w) = 2 * (e*gamma/beta)^(beta/gamma) * w^beta * exp(-w^gamma)`` with
shape ``gamma=3`` and time-bandwidth product ``P^2=60`` (so ``beta=20``),
sampled on the FFT grid of a fixed transform size.  Center frequencies are
log-spaced at ``voices_per_octave`` per octave, descending from Nyquist; the
literal small-bank reading (a fixed total number of filters across the same
span) is available through ``n_filters_total``.

Filters vanish at non-positive frequencies, which is what makes the
transform analytic, and each row is renormalized so its grid maximum is
exactly 2 (bandpass convention).  The transform itself is plain FFT
filtering: ``row_j = |ifft(fft(x) * filter_j)|`` truncated to the input
length, hence exactly linear in input amplitude.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

GAMMA_DEFAULT = 3.0
TIME_BANDWIDTH_DEFAULT = 60.0
IMAGE_SIZE = 224


@dataclass(frozen=True)
class MorseFilterBank:
    gamma: float
    time_bandwidth: float
    voices_per_octave: int
    sample_rate_hz: float
    n_fft: int
    center_freqs_hz: np.ndarray  # strictly decreasing, Hz
    filters: np.ndarray          # [n_scales, n_fft], real, >= 0

    @property
    def beta(self) -> float:
        return self.time_bandwidth / self.gamma

    @property
    def n_scales(self) -> int:
        return len(self.center_freqs_hz)


def peak_radian_frequency(gamma: float, beta: float) -> float:
    """Dimensionless frequency where the Morse wavelet peaks: (beta/gamma)^(1/gamma)."""
    return (beta / gamma) ** (1.0 / gamma)


def _morse_spectrum(w: np.ndarray, gamma: float, beta: float) -> np.ndarray:
    """Evaluate the bandpass-normalized Morse wavelet at radian frequencies w >= 0."""
    out = np.zeros_like(w)
    pos = w > 0
    log_amp = np.log(2.0) + (beta / gamma) * (1.0 + np.log(gamma) - np.log(beta))
    with np.errstate(over="ignore", under="ignore"):
        out[pos] = np.exp(log_amp + beta * np.log(w[pos]) - w[pos] ** gamma)
    return out


def build_filter_bank(
    sample_rate_hz: float,
    n_fft: int,
    voices_per_octave: int = 12,
    octaves: int = 8,
    gamma: float = GAMMA_DEFAULT,
    time_bandwidth: float = TIME_BANDWIDTH_DEFAULT,
    n_filters_total: int | None = None,
) -> MorseFilterBank:
    """Build the analytic filter bank for a given transform size.

    Center frequencies run from Nyquist down toward ``Nyquist / 2^octaves``;
    the default layout is ``voices_per_octave * octaves`` filters spaced by a
    factor ``2^(1/voices)``.  Passing ``n_filters_total`` switches to exactly
    that many filters, geometrically spaced across the same span.
    """
    if n_fft < 2:
        raise ValueError("n_fft must be >= 2")
    if octaves < 1 or voices_per_octave < 1:
        raise ValueError("octaves and voices_per_octave must be >= 1")
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    beta = time_bandwidth / gamma

    f_max = sample_rate_hz / 2.0
    f_min = f_max / 2.0**octaves
    if n_filters_total is not None:
        if n_filters_total < 2:
            raise ValueError("n_filters_total must be >= 2")
        centers = np.geomspace(f_max, f_min, n_filters_total)
    else:
        j = np.arange(voices_per_octave * octaves)
        centers = f_max * 2.0 ** (-j / voices_per_octave)

    w_peak = peak_radian_frequency(gamma, beta)
    # digital radian grid; bins above Nyquist stay zero (analytic)
    k = np.arange(n_fft // 2 + 1)
    w_grid = 2.0 * np.pi * k / n_fft

    filters = np.zeros((len(centers), n_fft))
    for row, fc in enumerate(centers):
        scale = w_peak / (2.0 * np.pi * fc / sample_rate_hz)
        spectrum = _morse_spectrum(scale * w_grid, gamma, beta)
        peak = spectrum.max()
        if peak <= 0:
            raise ValueError(f"filter at {fc:.6g} Hz has no support on this grid")
        filters[row, : n_fft // 2 + 1] = spectrum * (2.0 / peak)

    return MorseFilterBank(
        gamma=gamma,
        time_bandwidth=time_bandwidth,
        voices_per_octave=voices_per_octave,
        sample_rate_hz=sample_rate_hz,
        n_fft=n_fft,
        center_freqs_hz=centers,
        filters=filters,
    )


@dataclass(frozen=True)
class Scalogram:
    """CWT magnitudes, rows ordered high frequency first."""

    magnitudes: np.ndarray       # [n_scales, n_time], >= 0
    center_freqs_hz: np.ndarray


def cwt(samples, bank: MorseFilterBank) -> Scalogram:
    """Transform one segment; input is zero-padded up to ``bank.n_fft``."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("cwt expects a non-empty 1-D signal")
    if len(x) > bank.n_fft:
        raise ValueError(f"segment length {len(x)} exceeds n_fft {bank.n_fft}")
    spectrum = np.fft.fft(x, n=bank.n_fft)
    rows = np.fft.ifft(spectrum[None, :] * bank.filters, axis=1)
    mags = np.abs(rows[:, : len(x)])
    return Scalogram(magnitudes=mags, center_freqs_hz=bank.center_freqs_hz)


def dominant_row(scalogram: Scalogram) -> int:
    """Row with the largest summed magnitude (used by the tone localization checks)."""
    return int(np.argmax(scalogram.magnitudes.sum(axis=1)))


# ---------------------------------------------------------------------------
# image export


@dataclass(frozen=True)
class ScalogramImage:
    pixels: np.ndarray  # [224, 224, 3] uint8
    label: int
    campaign_id: str
    sensor_id: str
    cycle_index: int


def load_colormap() -> np.ndarray:
    """The versioned 256-entry blue->green->yellow LUT shipped with the package."""
    lut = np.zeros((256, 3), dtype=np.uint8)
    with resources.files("aepipeline.data").joinpath("bgy256.csv").open("r") as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
    if len(rows) != 256:
        raise ValueError(f"colormap LUT must have 256 entries, got {len(rows)}")
    for i, row in enumerate(rows):
        lut[i] = [int(v) for v in row]
    return lut


def _resize_axis0(m: np.ndarray, n_out: int) -> np.ndarray:
    """Linear interpolation along axis 0 with endpoint-aligned sample positions."""
    n_in = m.shape[0]
    if n_in == 1:
        return np.repeat(m, n_out, axis=0)
    x = np.linspace(0.0, n_in - 1.0, n_out)
    i0 = np.minimum(x.astype(np.int64), n_in - 2)
    frac = (x - i0)[:, None]
    return m[i0] * (1.0 - frac) + m[i0 + 1] * frac


def resize_bilinear(m: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Separable bilinear resize; deterministic and dependency-free."""
    out = _resize_axis0(np.asarray(m, dtype=np.float64), shape[0])
    return _resize_axis0(out.T, shape[1]).T


def to_image(
    scalogram: Scalogram,
    lut: np.ndarray | None = None,
    label: int = 0,
    campaign_id: str = "",
    sensor_id: str = "",
    cycle_index: int = 0,
) -> ScalogramImage:
    """Quantize a scalogram into the fixed 224x224x3 8-bit form.

    Magnitudes are resized first, then min-max scaled per image and pushed
    through the LUT.  A constant scalogram maps to LUT entry 0 by decision,
    so degenerate inputs still produce valid images.
    """
    if scalogram.magnitudes.size == 0:
        raise ValueError("empty scalogram")
    if lut is None:
        lut = load_colormap()
    m = resize_bilinear(scalogram.magnitudes, (IMAGE_SIZE, IMAGE_SIZE))
    lo, hi = float(m.min()), float(m.max())
    if hi > lo:
        norm = (m - lo) / (hi - lo)
    else:
        norm = np.zeros_like(m)
    idx = np.minimum((norm * 256.0).astype(np.int64), 255)
    return ScalogramImage(
        pixels=lut[idx],
        label=label,
        campaign_id=campaign_id,
        sensor_id=sensor_id,
        cycle_index=cycle_index,
    )
