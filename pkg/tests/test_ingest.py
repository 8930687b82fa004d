"""Stream container round-trips, manifest validation, synthetic generator."""

import json

import numpy as np
import pytest

from aepipeline import ingest


def _manifest(n_samples, schedule=(), **kw):
    return ingest.StreamManifest(
        campaign_id=kw.get("campaign_id", "T"),
        sensor_id=kw.get("sensor_id", "mu80"),
        sample_rate_hz=kw.get("sample_rate_hz", 1000.0),
        n_samples=n_samples,
        torque_schedule=schedule,
    )


def test_empty_stream_roundtrip(tmp_path):
    stream = ingest.AEStream(_manifest(0), np.array([], dtype=np.float32))
    ingest.write_stream(stream, tmp_path / "s")
    assert (tmp_path / "s.f32le").stat().st_size == 0
    back = ingest.read_stream(tmp_path / "s")
    assert back.manifest == stream.manifest
    assert len(back.samples) == 0


def test_three_sample_payload_is_12_bytes(tmp_path):
    stream = ingest.AEStream(_manifest(3), np.array([1.0, -2.5, 0.0], dtype=np.float32))
    ingest.write_stream(stream, tmp_path / "s")
    assert (tmp_path / "s.f32le").stat().st_size == 12


def test_large_roundtrip_bitexact(tmp_path):
    rng = np.random.default_rng(0)
    samples = rng.standard_normal(1_000_000).astype(np.float32)
    stream = ingest.AEStream(_manifest(len(samples), ((1, 0, 500_000), (2, 500_000, 1_000_000))), samples)
    ingest.write_stream(stream, tmp_path / "big")
    raw = (tmp_path / "big.f32le").read_bytes()
    assert raw == samples.tobytes()
    back = ingest.read_stream(tmp_path / "big")
    assert np.array_equal(back.samples, samples)
    assert back.manifest == stream.manifest


def test_roundtrip_property_random_streams(tmp_path):
    rng = np.random.default_rng(42)
    for trial in range(20):
        n = int(rng.integers(0, 2000))
        samples = rng.standard_normal(n).astype(np.float32)
        k = int(rng.integers(0, 4))
        edges = np.sort(rng.choice(np.arange(n + 1), size=2 * k, replace=False)) if n >= 2 * k and k else []
        schedule = tuple(
            (i + 1, int(edges[2 * i]), int(edges[2 * i + 1]))
            for i in range(k)
            if k and int(edges[2 * i]) < int(edges[2 * i + 1])
        )
        stream = ingest.AEStream(_manifest(n, schedule), samples)
        ingest.write_stream(stream, tmp_path / f"t{trial}")
        back = ingest.read_stream(tmp_path / f"t{trial}")
        assert np.array_equal(back.samples, samples)
        assert back.manifest == stream.manifest


def test_read_accepts_json_suffix(tmp_path):
    stream = ingest.AEStream(_manifest(2), np.array([0.5, 1.5], dtype=np.float32))
    ingest.write_stream(stream, tmp_path / "s")
    assert np.array_equal(ingest.read_stream(tmp_path / "s.json").samples, stream.samples)


def test_length_mismatch_rejected(tmp_path):
    stream = ingest.AEStream(_manifest(100), np.zeros(100, dtype=np.float32))
    ingest.write_stream(stream, tmp_path / "s")
    payload = (tmp_path / "s.f32le").read_bytes()
    (tmp_path / "s.f32le").write_bytes(payload[:-4])  # drop one sample
    with pytest.raises(ingest.StreamFormatError, match="99"):
        ingest.read_stream(tmp_path / "s")


def test_overlapping_intervals_rejected():
    with pytest.raises(ingest.StreamFormatError, match="overlaps"):
        _manifest(100, ((1, 0, 60), (2, 50, 100))).validate()


def test_unordered_intervals_rejected():
    with pytest.raises(ingest.StreamFormatError):
        _manifest(100, ((2, 50, 100), (1, 0, 50))).validate()


def test_unknown_encoding_rejected(tmp_path):
    stream = ingest.AEStream(_manifest(1), np.array([1.0], dtype=np.float32))
    ingest.write_stream(stream, tmp_path / "s")
    man = json.loads((tmp_path / "s.json").read_text())
    man["encoding"] = "f64be-v0"
    (tmp_path / "s.json").write_text(json.dumps(man))
    with pytest.raises(ingest.StreamFormatError, match="encoding"):
        ingest.read_stream(tmp_path / "s")


def test_non_finite_samples_rejected():
    with pytest.raises(ingest.StreamFormatError, match="finite"):
        ingest.AEStream(_manifest(2), np.array([1.0, np.nan], dtype=np.float32))


def test_class_out_of_range_rejected():
    with pytest.raises(ingest.StreamFormatError, match="class_index"):
        _manifest(10, ((9, 0, 5),)).validate()


def test_schedule_coverage_no_double_labels():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(10, 200))
        cuts = np.sort(rng.choice(np.arange(n), size=min(6, n // 2), replace=False))
        schedule = []
        for i in range(0, len(cuts) - 1, 2):
            schedule.append((i // 2 + 1, int(cuts[i]), int(cuts[i + 1])))
        man = _manifest(n, tuple(schedule))
        man.validate()
        for idx in range(n):
            owners = [c for c, s, e in schedule if s <= idx < e]
            assert len(owners) <= 1
            assert man.class_at(idx) == (owners[0] if owners else None)


# --- synthetic generator -----------------------------------------------------


def _spec(**kw):
    defaults = dict(
        sample_rate_hz=100_000.0,
        class_burst_freqs_hz=tuple(2000.0 * 2 ** (k / 2) for k in range(7)),
        seconds_per_level=1.0,
        snr_db=2.3,
        seed=5,
    )
    defaults.update(kw)
    return ingest.SyntheticSpec(**defaults)


def test_synthetic_sample_count():
    vib, ae = ingest.generate_synthetic(_spec())
    assert vib.manifest.n_samples == 700_000
    assert ae.manifest.n_samples == 700_000
    assert len(ae.manifest.torque_schedule) == 7


def test_synthetic_determinism(tmp_path):
    vib1, ae1 = ingest.generate_synthetic(_spec())
    vib2, ae2 = ingest.generate_synthetic(_spec())
    assert ae1.samples.tobytes() == ae2.samples.tobytes()
    assert vib1.samples.tobytes() == vib2.samples.tobytes()


def test_synthetic_seed_changes_output():
    _, ae1 = ingest.generate_synthetic(_spec(seed=1))
    _, ae2 = ingest.generate_synthetic(_spec(seed=2))
    assert ae1.samples.tobytes() != ae2.samples.tobytes()


def test_synthetic_snr_matches_request():
    # oracle: recompute the peak-to-peak ratio from the returned parts
    for target in (2.3, -6.0):
        _, _, parts = ingest.generate_synthetic(_spec(snr_db=target), return_parts=True)
        pp_signal = parts["clean"].max() - parts["clean"].min()
        pp_noise = parts["noise"].max() - parts["noise"].min()
        measured = 10 * np.log10(pp_signal**2 / pp_noise**2)
        assert abs(measured - target) < 0.5


def test_synthetic_nyquist_violation_rejected():
    # fs = 100 kHz: anything at or above 50 kHz must be refused
    with pytest.raises(ValueError, match="Nyquist"):
        _spec(class_burst_freqs_hz=tuple(49_000.0 + 500 * k for k in range(7))).validate()


def test_synthetic_nonmonotone_freqs_rejected():
    with pytest.raises(ValueError, match="monotone"):
        _spec(class_burst_freqs_hz=(1.0, 3.0, 2.0, 4.0, 5.0, 6.0, 7.0) ).validate()


def test_synthetic_nonpositive_duration_rejected():
    with pytest.raises(ValueError, match="positive"):
        _spec(seconds_per_level=0.0).validate()
