import numpy as np
import pytest

from gbfilt.errors import DataError
from gbfilt.io import atomic_write_text, read_signal, write_signal
from gbfilt.signals import Signal


class TestCsv:
    def test_round_trip_exact(self, tmp_path):
        path = tmp_path / "sig.csv"
        samples = np.array([0.1, -2.5, 1.0 / 3.0, 1e-300])
        write_signal(path, Signal(samples))
        back, kind = read_signal(path)
        assert kind == "csv"
        assert np.array_equal(back.samples, samples)

    def test_write_is_byte_stable(self, tmp_path):
        sig = Signal(np.array([1.0 / 3.0, -0.7]))
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_signal(p1, sig)
        write_signal(p2, sig)
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_round_trip(self, tmp_path):
        path = tmp_path / "sig.csv"
        write_signal(path, Signal([1.0, 2.0]), header="value")
        assert path.read_text().splitlines()[0] == "value"
        back, _ = read_signal(path)
        assert np.array_equal(back.samples, [1.0, 2.0])

    def test_blank_lines_and_trailing_commas(self, tmp_path):
        path = tmp_path / "sig.csv"
        path.write_text("1.5,\n\n-2.0\n\n")
        back, _ = read_signal(path)
        assert np.array_equal(back.samples, [1.5, -2.0])

    def test_bad_line_is_reported_with_number(self, tmp_path):
        path = tmp_path / "sig.csv"
        path.write_text("amplitude\n1.0\noops\n2.0\n")
        with pytest.raises(DataError, match="line 3"):
            read_signal(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "sig.csv"
        path.write_text("1.0\nnan\n")
        with pytest.raises(DataError, match="line 2"):
            read_signal(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "sig.csv"
        path.write_text("")
        with pytest.raises(DataError, match="no samples"):
            read_signal(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            read_signal(tmp_path / "absent.csv")


class TestWav:
    def test_wav16_round_trip_quantized(self, tmp_path):
        path = tmp_path / "sig.wav"
        rng = np.random.default_rng(0)
        samples = rng.uniform(-0.9, 0.9, 500)
        write_signal(path, Signal(samples, sample_rate=16000.0), kind="wav16")
        back, kind = read_signal(path)
        assert kind == "wav16"
        assert back.sample_rate == 16000.0
        assert np.max(np.abs(back.samples - samples)) <= 0.5 / 32768.0 + 1e-12

    def test_wav16_clips_overrange(self, tmp_path):
        path = tmp_path / "sig.wav"
        write_signal(path, Signal([2.0, -2.0], sample_rate=8000.0), kind="wav16")
        back, _ = read_signal(path)
        assert back.samples[0] == pytest.approx(32767.0 / 32768.0)
        assert back.samples[1] == -1.0

    def test_wav32_round_trip_float32(self, tmp_path):
        path = tmp_path / "sig.wav"
        rng = np.random.default_rng(1)
        samples = rng.normal(size=300)
        write_signal(path, Signal(samples, sample_rate=44100.0), kind="wav32")
        back, kind = read_signal(path)
        assert kind == "wav32"
        assert np.array_equal(
            back.samples, samples.astype(np.float32).astype(np.float64)
        )

    def test_wav_needs_sample_rate(self, tmp_path):
        with pytest.raises(DataError, match="sample rate"):
            write_signal(tmp_path / "sig.wav", Signal([1.0]), kind="wav16")

    def test_unknown_kind(self, tmp_path):
        sig = Signal([1.0], sample_rate=8000.0)
        with pytest.raises(DataError, match="unknown signal format"):
            write_signal(tmp_path / "sig.bin", sig, kind="flac")

    def test_stereo_rejected(self, tmp_path):
        import scipy.io.wavfile

        path = tmp_path / "stereo.wav"
        data = np.zeros((100, 2), dtype=np.int16)
        scipy.io.wavfile.write(path, 8000, data)
        with pytest.raises(DataError, match="mono"):
            read_signal(path)

    def test_garbage_wav_rejected(self, tmp_path):
        path = tmp_path / "fake.wav"
        path.write_bytes(b"RIFFnope")
        with pytest.raises(DataError, match="unreadable WAV"):
            read_signal(path)


class TestAtomic:
    def test_failure_leaves_no_droppings(self, tmp_path):
        missing = tmp_path / "not" / "a" / "dir" / "out.csv"
        with pytest.raises(OSError):
            atomic_write_text(missing, "data")
        assert list(tmp_path.iterdir()) == []

    def test_overwrite_replaces_content(self, tmp_path):
        path = tmp_path / "out.txt"
        atomic_write_text(path, "first")
        atomic_write_text(path, "second")
        assert path.read_text() == "second"
        # no stray temp files left behind
        assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
