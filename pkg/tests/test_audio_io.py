import struct

import numpy as np
import pytest

from vowelmark.audio_io import (
    AudioSignal,
    load_wav,
    parse_manifest,
    resample,
    wav_duration_s,
    write_wav,
)
from vowelmark.errors import (
    BadEnum,
    CorruptHeader,
    DuplicateInstance,
    MissingFile,
    UnsupportedChannels,
    UnsupportedEncoding,
)

from conftest import fft_peak_hz, make_tone


def _wav_bytes(payload: bytes, audio_format=1, channels=1, rate=16000, bits=16):
    block = channels * bits // 8
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, audio_format, channels, rate, rate * block, block, bits
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


def test_silence_loads_as_zeros(tmp_path):
    path = tmp_path / "silence.wav"
    write_wav(path, AudioSignal(np.zeros(16000), 16000))
    sig = load_wav(path)
    assert len(sig) == 16000
    assert sig.sample_rate == 16000
    assert np.all(sig.samples == 0.0)


def test_full_scale_square_wave_exact_codes(tmp_path):
    codes = np.tile(np.array([32767, -32768], dtype="<i2"), 100)
    path = tmp_path / "square.wav"
    path.write_bytes(_wav_bytes(codes.tobytes()))
    sig = load_wav(path)
    assert np.all(sig.samples[0::2] == 32767.0 / 32768.0)
    assert np.all(sig.samples[1::2] == -1.0)


def test_stereo_rejected(tmp_path):
    payload = np.zeros(400, dtype="<i2").tobytes()
    path = tmp_path / "stereo.wav"
    path.write_bytes(_wav_bytes(payload, channels=2))
    with pytest.raises(UnsupportedChannels):
        load_wav(path)


def test_unsupported_encodings_rejected(tmp_path):
    path = tmp_path / "odd.wav"
    path.write_bytes(_wav_bytes(b"\x00" * 100, bits=8))
    with pytest.raises(UnsupportedEncoding):
        load_wav(path)
    path.write_bytes(_wav_bytes(b"\x00" * 160, audio_format=3, bits=64))
    with pytest.raises(UnsupportedEncoding):
        load_wav(path)


def test_corrupt_headers_rejected(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"OGGS" + b"\x00" * 64)
    with pytest.raises(CorruptHeader):
        load_wav(path)
    good = _wav_bytes(np.zeros(100, dtype="<i2").tobytes())
    path.write_bytes(good[:30])  # truncated mid-chunk
    with pytest.raises(CorruptHeader):
        load_wav(path)


def test_pcm16_roundtrip_lossless(tmp_path, rng):
    codes = rng.integers(-32768, 32768, size=5000).astype(np.int16)
    sig = AudioSignal(codes.astype(float) / 32768.0, 16000)
    path = tmp_path / "rt.wav"
    write_wav(path, sig)
    back = load_wav(path)
    assert np.array_equal(back.samples, sig.samples)


def test_float32_roundtrip(tmp_path, rng):
    x = rng.uniform(-1, 1, 3000).astype(np.float32).astype(float)
    path = tmp_path / "f32.wav"
    write_wav(path, AudioSignal(x, 22050), encoding="float32")
    back = load_wav(path)
    assert back.sample_rate == 22050
    assert np.array_equal(back.samples, x)


def test_wav_duration_from_header(tmp_path):
    write_wav(tmp_path / "d.wav", AudioSignal(np.zeros(24000), 16000))
    assert wav_duration_s(tmp_path / "d.wav") == pytest.approx(1.5)


def test_signal_invariants():
    with pytest.raises(ValueError):
        AudioSignal(np.zeros(0), 16000)
    with pytest.raises(ValueError):
        AudioSignal(np.array([0.0, np.nan]), 16000)
    with pytest.raises(ValueError):
        AudioSignal(np.array([1.5]), 16000)
    with pytest.raises(ValueError):
        AudioSignal(np.zeros(10), 4000)
    sig = AudioSignal(np.zeros(10), 16000)
    with pytest.raises(ValueError):
        sig.samples[0] = 1.0  # buffer is read-only


def test_resample_identity_is_bitwise():
    sig = make_tone(440, 0.5)
    out = resample(sig, 16000)
    assert out is sig


def test_resample_preserves_tone_frequency():
    sig = make_tone(440, 2.0, rate=48000)
    out = resample(sig, 16000)
    assert abs(fft_peak_hz(out) - 440.0) <= 1.0


def test_resample_doubles_length():
    sig = make_tone(200, 1.0, rate=8000)
    out = resample(sig, 16000)
    assert abs(len(out) - 2 * len(sig)) <= 1


def test_resample_up_down_keeps_peaks():
    for freq in (220.0, 950.0, 3100.0):
        sig = make_tone(freq, 1.0, rate=16000)
        back = resample(resample(sig, 32000), 16000)
        assert abs(fft_peak_hz(back) - freq) <= 1.0


def _write_manifest(path, rows, header="speaker_id,session,gender,kind,path"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")


@pytest.fixture
def wav_file(tmp_path):
    p = tmp_path / "a.wav"
    write_wav(p, AudioSignal(np.zeros(1600), 16000))
    return p


def test_manifest_counts_and_order(tmp_path, wav_file):
    rows = []
    for spk in ("s2", "s1"):
        for sess in ("post", "pre"):
            for kind in ("u", "o", "i", "e", "a"):
                rows.append(f"{spk},{sess},m,{kind},{wav_file.name}")
    mpath = tmp_path / "m.csv"
    _write_manifest(mpath, rows)
    manifest = parse_manifest(mpath)
    assert len(manifest.instances) == 20
    assert manifest.speakers() == ["s1", "s2"]
    first = manifest.instances[0]
    assert (first.speaker_id, first.session.value, first.kind) == ("s1", "pre", "a")


def test_manifest_order_independent_of_row_order(tmp_path, wav_file):
    rows = [
        f"s1,pre,m,a,{wav_file.name}",
        f"s1,pre,m,e,{wav_file.name}",
        f"s1,post,f,a,{wav_file.name}",
        f"s1,post,f,e,{wav_file.name}",
    ]
    m1 = tmp_path / "m1.csv"
    m2 = tmp_path / "m2.csv"
    _write_manifest(m1, rows)
    _write_manifest(m2, rows[::-1])
    a = parse_manifest(m1)
    b = parse_manifest(m2)
    assert [i.sort_key() for i in a.instances] == [i.sort_key() for i in b.instances]


def test_manifest_duplicate_instance(tmp_path, wav_file):
    rows = [f"s1,pre,m,a,{wav_file.name}", f"s1,pre,m,a,{wav_file.name}"]
    mpath = tmp_path / "m.csv"
    _write_manifest(mpath, rows)
    with pytest.raises(DuplicateInstance):
        parse_manifest(mpath)


def test_manifest_bad_enum_cites_row(tmp_path, wav_file):
    rows = [f"s1,pre,m,a,{wav_file.name}", f"s1,mid,m,a,{wav_file.name}"]
    mpath = tmp_path / "m.csv"
    _write_manifest(mpath, rows)
    with pytest.raises(BadEnum, match="row 3"):
        parse_manifest(mpath)


def test_manifest_missing_file(tmp_path, wav_file):
    rows = [f"s1,pre,m,a,nope.wav"]
    mpath = tmp_path / "m.csv"
    _write_manifest(mpath, rows)
    with pytest.raises(MissingFile):
        parse_manifest(mpath)
