import numpy as np
import pytest

from vowelmark.audio_io import AudioSignal


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def make_tone(freq_hz: float, duration_s: float, rate: int = 16000,
              amplitude: float = 0.4) -> AudioSignal:
    t = np.arange(int(duration_s * rate)) / rate
    return AudioSignal(amplitude * np.sin(2 * np.pi * freq_hz * t), rate)


def make_noise(duration_s: float, level_dbfs: float, seed: int = 0,
               rate: int = 16000) -> AudioSignal:
    g = np.random.default_rng(seed)
    x = g.standard_normal(int(duration_s * rate))
    x = x / np.sqrt(np.mean(x**2)) * 10.0 ** (level_dbfs / 20.0)
    return AudioSignal(np.clip(x, -1.0, 1.0), rate)


def fft_peak_hz(signal: AudioSignal) -> float:
    """Independent spectral-peak oracle: rfft magnitude argmax with
    parabolic refinement."""
    x = signal.samples - signal.samples.mean()
    mags = np.abs(np.fft.rfft(x))
    k = int(np.argmax(mags))
    if 0 < k < mags.size - 1:
        denom = mags[k - 1] - 2 * mags[k] + mags[k + 1]
        if denom < 0:
            k = k + 0.5 * (mags[k - 1] - mags[k + 1]) / denom
    return k * signal.sample_rate / x.size
