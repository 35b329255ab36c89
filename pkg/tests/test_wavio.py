"""WAV reading/writing: scaling conventions and exact float round-trips."""

import numpy as np
import pytest
from scipy.io import wavfile

from fastsdr.errors import EmptyInputError, LengthMismatchError
from fastsdr.wavio import load_signal_set, read_wav, write_wav


def test_float64_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(100)
    samples = rng.standard_normal((2, 333))
    path = tmp_path / "f64.wav"
    write_wav(path, 16000, samples)
    rate, back = read_wav(path)
    assert rate == 16000
    assert back.dtype == np.float64
    assert np.array_equal(back, samples)


def test_float32_round_trip(tmp_path):
    rng = np.random.default_rng(101)
    samples = rng.standard_normal((1, 50)).astype(np.float32).astype(np.float64)
    path = tmp_path / "f32.wav"
    write_wav(path, 8000, samples, fmt="float32")
    rate, back = read_wav(path)
    assert rate == 8000
    assert np.array_equal(back, samples)


def test_int16_scaling(tmp_path):
    path = tmp_path / "i16.wav"
    data = np.array([[-32768, 16384, 32767]], dtype=np.int16)
    wavfile.write(path, 44100, data.T)
    rate, back = read_wav(path)
    assert rate == 44100
    assert np.allclose(back, [[-1.0, 0.5, 32767 / 32768]], atol=0)


def test_int32_scaling(tmp_path):
    path = tmp_path / "i32.wav"
    data = np.array([[-(2**31), 2**30]], dtype=np.int32)
    wavfile.write(path, 16000, data.T)
    _, back = read_wav(path)
    assert np.allclose(back, [[-1.0, 0.5]], atol=0)


def test_24bit_left_justified_scaling(tmp_path):
    # 24-bit PCM arrives from the reader left-justified in int32
    path = tmp_path / "i24.wav"
    half = 2**22 << 8  # +0.5 at full scale
    data = np.array([[half, -(2**23) << 8]], dtype=np.int32)
    wavfile.write(path, 16000, data.T)
    _, back = read_wav(path)
    assert np.allclose(back, [[0.5, -1.0]], atol=0)


def test_write_int16_clips_and_quantizes(tmp_path):
    path = tmp_path / "wi16.wav"
    write_wav(path, 16000, np.array([[-1.5, -1.0, 0.25, 1.0]]), fmt="int16")
    _, data = wavfile.read(path)
    assert data.dtype == np.int16
    assert list(data) == [-32768, -32768, 8192, 32767]


def test_write_rejects_bad_inputs(tmp_path):
    with pytest.raises(ValueError):
        write_wav(tmp_path / "x.wav", 16000, np.ones(5))
    with pytest.raises(ValueError):
        write_wav(tmp_path / "x.wav", 16000, np.ones((1, 5)), fmt="int8")


def test_read_mono_gets_channel_axis(tmp_path):
    path = tmp_path / "mono.wav"
    wavfile.write(path, 16000, np.zeros(10, dtype=np.float32))
    _, back = read_wav(path)
    assert back.shape == (1, 10)


def test_load_signal_set_concatenates_channels(tmp_path):
    rng = np.random.default_rng(102)
    a = rng.standard_normal((2, 40))
    b = rng.standard_normal((1, 40))
    pa, pb = tmp_path / "a.wav", tmp_path / "b.wav"
    write_wav(pa, 16000, a)
    write_wav(pb, 16000, b)
    sig = load_signal_set([pa, pb])
    assert sig.channels == 3
    assert sig.sample_rate == 16000.0
    assert np.array_equal(sig.samples, np.vstack([a, b]))


def test_load_signal_set_rejects_mismatches(tmp_path):
    pa, pb, pc = (tmp_path / n for n in ("a.wav", "b.wav", "c.wav"))
    write_wav(pa, 16000, np.ones((1, 40)))
    write_wav(pb, 22050, np.ones((1, 40)))
    write_wav(pc, 16000, np.ones((1, 39)))
    with pytest.raises(LengthMismatchError):
        load_signal_set([pa, pb])
    with pytest.raises(LengthMismatchError):
        load_signal_set([pa, pc])
    with pytest.raises(EmptyInputError):
        load_signal_set([])


def test_read_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        read_wav(tmp_path / "nope.wav")
