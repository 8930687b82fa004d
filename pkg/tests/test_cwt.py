"""Morse filter bank properties, transform behavior, image quantization."""

import numpy as np
import pytest

from aepipeline import cwt

FS = 5_000_000.0


@pytest.fixture(scope="module")
def bank():
    return cwt.build_filter_bank(FS, n_fft=16384, voices_per_octave=12, octaves=8)


def test_peak_frequency_closed_form():
    # (beta/gamma)^(1/gamma) with gamma=3, beta=20
    assert abs(cwt.peak_radian_frequency(3.0, 20.0) - (20.0 / 3.0) ** (1.0 / 3.0)) < 1e-12
    assert abs(cwt.peak_radian_frequency(3.0, 20.0) - 1.8821) < 1e-4


def test_filter_count_and_spacing(bank):
    assert bank.n_scales == 96
    ratios = bank.center_freqs_hz[:-1] / bank.center_freqs_hz[1:]
    assert np.allclose(ratios, 2 ** (1 / 12), rtol=1e-12)
    assert bank.center_freqs_hz[0] == FS / 2
    assert np.all(np.diff(bank.center_freqs_hz) < 0)


def test_literal_filter_count():
    small = cwt.build_filter_bank(FS, n_fft=4096, n_filters_total=12)
    assert small.n_scales == 12
    assert small.center_freqs_hz[0] == FS / 2
    assert abs(small.center_freqs_hz[-1] - FS / 2 / 2**8) < 1e-6


def test_filters_peak_at_two(bank):
    assert np.allclose(bank.filters.max(axis=1), 2.0, atol=1e-9)


def test_filters_are_analytic(bank):
    # exactly zero at DC and at all strictly negative frequencies
    assert np.all(bank.filters[:, 0] == 0.0)
    assert np.all(bank.filters[:, bank.n_fft // 2 + 1 :] == 0.0)
    assert np.all(bank.filters >= 0.0)


def test_filter_peak_bin_near_center(bank):
    bins = np.argmax(bank.filters, axis=1)
    freqs = bins * FS / bank.n_fft
    # within one voice step wherever the grid can resolve it
    ratio = np.maximum(freqs, bank.center_freqs_hz) / np.minimum(freqs, bank.center_freqs_hz)
    assert np.all(ratio[bank.center_freqs_hz > FS / bank.n_fft * 4] < 2 ** (1 / 12))


def test_cwt_zero_signal(bank):
    sg = cwt.cwt(np.zeros(4096), bank)
    assert sg.magnitudes.shape == (96, 4096)
    assert np.all(sg.magnitudes == 0.0)


def test_cwt_linearity(bank):
    rng = np.random.default_rng(1)
    x = rng.standard_normal(2048)
    a = cwt.cwt(x, bank).magnitudes
    b = cwt.cwt(2.0 * x, bank).magnitudes
    assert np.allclose(b, 2.0 * a, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("tone_hz", [10_000.0, 100_000.0, 300_000.0, 1_000_000.0])
def test_tone_localization(bank, tone_hz):
    # oracle: argmax over rows of summed magnitude must hit the tone's band
    t = np.arange(bank.n_fft) / FS
    sg = cwt.cwt(np.sin(2 * np.pi * tone_hz * t), bank)
    fc = bank.center_freqs_hz[cwt.dominant_row(sg)]
    assert max(fc / tone_hz, tone_hz / fc) <= 2 ** (1 / 12) + 1e-9


def test_cwt_rejects_bad_input(bank):
    with pytest.raises(ValueError):
        cwt.cwt(np.array([]), bank)
    with pytest.raises(ValueError):
        cwt.cwt(np.zeros(bank.n_fft + 1), bank)


def test_resize_bilinear_identity():
    m = np.arange(12.0).reshape(3, 4)
    assert np.allclose(cwt.resize_bilinear(m, (3, 4)), m)


def test_resize_bilinear_constant():
    m = np.full((5, 7), 3.25)
    out = cwt.resize_bilinear(m, (224, 224))
    assert out.shape == (224, 224)
    assert np.allclose(out, 3.25)


def test_colormap_lut():
    lut = cwt.load_colormap()
    assert lut.shape == (256, 3)
    assert lut.dtype == np.uint8
    # green channel is non-decreasing: used below to compare LUT positions
    assert np.all(np.diff(lut[:, 1].astype(int)) >= 0)
    assert lut[0, 2] > lut[0, 0]          # dark blue end
    assert lut[255, 0] > lut[255, 2]      # yellow end


def test_image_shape_and_degenerate_normalization():
    lut = cwt.load_colormap()
    sg = cwt.Scalogram(np.full((96, 300), 7.0), np.linspace(1000, 1, 96))
    img = cwt.to_image(sg, lut=lut)
    assert img.pixels.shape == (224, 224, 3)
    assert img.pixels.dtype == np.uint8
    assert np.all(img.pixels == lut[0])


def test_image_monotone_in_magnitude():
    # larger magnitude => LUT position >= smaller's; the LUT's green channel
    # is non-decreasing, so it orders LUT positions
    rng = np.random.default_rng(2)
    mags = rng.random((48, 300))
    sg = cwt.Scalogram(mags, np.linspace(1000, 1, 48))
    img = cwt.to_image(sg)
    resized = cwt.resize_bilinear(mags, (224, 224))
    flat_m = resized.reshape(-1)
    flat_g = img.pixels[:, :, 1].astype(int).reshape(-1)
    idx = rng.choice(len(flat_m), size=(500, 2))
    for a, b in idx:
        if flat_m[a] > flat_m[b]:
            assert flat_g[a] >= flat_g[b]


def test_image_carries_provenance():
    sg = cwt.Scalogram(np.random.default_rng(0).random((24, 50)), np.linspace(100, 1, 24))
    img = cwt.to_image(sg, label=4, campaign_id="B", sensor_id="mu80", cycle_index=17)
    assert (img.label, img.campaign_id, img.sensor_id, img.cycle_index) == (4, "B", "mu80", 17)
