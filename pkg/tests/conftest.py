"""Shared fixtures: the desk-scale synthetic datasets used across tests.

Both datasets are deterministic, so building them once per session keeps the
suite fast without hiding any randomness.
"""

from __future__ import annotations

import numpy as np
import pytest

from aepipeline import cwt, ingest, segmentation, trainer

DESK_FS = 50_000.0
SEPARABLE_FREQS = tuple(2000.0 * 2 ** (k / 2) for k in range(7))
OVERLAPPING_FREQS = tuple(1500.0 * 2 ** (k / 3) for k in range(7))


def make_campaign(campaign_id: str, seed: int, snr_db: float, freqs, seconds_per_level=1.0,
                  bursts_per_cycle=3):
    spec = ingest.SyntheticSpec(
        sample_rate_hz=DESK_FS,
        class_burst_freqs_hz=freqs,
        seconds_per_level=seconds_per_level,
        snr_db=snr_db,
        bursts_per_cycle=bursts_per_cycle,
        seed=seed,
        campaign_id=campaign_id,
    )
    vib, ae = ingest.generate_synthetic(spec)
    return [segmentation.apply_hanning(s) for s in segmentation.segment_cycles(ae, vib)]


def featurize_segments(segments, fs=DESK_FS, octaves=6):
    max_len = max(len(s.samples) for s in segments)
    n_fft = 1 << (max_len - 1).bit_length()
    bank = cwt.build_filter_bank(fs, n_fft=n_fft, voices_per_octave=12, octaves=octaves)
    features = np.array([trainer.featurize(cwt.cwt(s.samples, bank)) for s in segments])
    labels = np.array([s.class_index for s in segments], dtype=int)
    entries = [
        {
            "class": s.class_index,
            "campaign": s.campaign_id,
            "sensor": s.sensor_id,
            "cycle_index": s.cycle_index,
            "path": "",
        }
        for s in segments
    ]
    return features, labels, entries


@pytest.fixture(scope="session")
def desk_dataset():
    """Three easily separable campaigns; LOCO on campaign C is learnable."""
    segments = []
    for cid, seed in (("A", 11), ("B", 22), ("C", 33)):
        segments += make_campaign(cid, seed, snr_db=2.3, freqs=SEPARABLE_FREQS)
    return featurize_segments(segments)


@pytest.fixture(scope="session")
def noisy_dataset():
    """Two campaigns with overlapping classes; errors are plentiful."""
    segments = []
    for cid, seed in (("A", 101), ("B", 202)):
        segments += make_campaign(
            cid, seed, snr_db=-6.0, freqs=OVERLAPPING_FREQS, bursts_per_cycle=2
        )
    return featurize_segments(segments)
