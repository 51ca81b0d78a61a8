"""Audio and manifest IO: WAV read/write, resampling, cohort manifests.

Only mono RIFF/WAVE files are accepted, either 16-bit PCM or 32-bit IEEE
float. All DSP downstream runs at the canonical 16 kHz rate.
"""

from __future__ import annotations

import csv
import os
import struct
import tempfile
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.signal import resample_poly

from .errors import (
    BadEnum,
    CorruptHeader,
    DuplicateInstance,
    MissingFile,
    UnsupportedChannels,
    UnsupportedEncoding,
)

CANONICAL_RATE = 16000

PCM16_SCALE = 32768.0

VOWELS = ("a", "e", "i", "o", "u")
N_PHRASES = 20


@dataclass(frozen=True)
class AudioSignal:
    """Mono sample buffer plus its sample rate.

    Samples are float64 in [-1, 1], finite, non-empty; the buffer is
    read-only so signals can be shared freely across workers.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if np.max(np.abs(arr)) > 1.0 + 1e-12:
            raise ValueError("samples must lie in [-1, 1]")
        if int(self.sample_rate) < 8000:
            raise ValueError("sample_rate must be >= 8000 Hz")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


def _find_chunks(data: bytes):
    """Yield (chunk id, payload) pairs of a RIFF body."""
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        payload = data[pos + 8:pos + 8 + size]
        if len(payload) < size:
            raise CorruptHeader(f"truncated chunk {cid!r}")
        yield cid, payload
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def load_wav(path) -> AudioSignal:
    """Load a mono PCM16 or float32 WAV file, samples scaled to [-1, 1].

    16-bit codes map to s/32768, so +32767 becomes 32767/32768 and
    -32768 becomes exactly -1.0.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, body in _find_chunks(data):
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            payload = body
    if fmt is None or payload is None:
        raise CorruptHeader(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise CorruptHeader(f"{path}: short fmt chunk")

    audio_format, n_channels, sample_rate, _, _, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if audio_format == 0xFFFE and len(fmt) >= 26:
        # WAVE_FORMAT_EXTENSIBLE: first two GUID bytes carry the real tag
        (audio_format,) = struct.unpack_from("<H", fmt, 24)
    if n_channels != 1:
        raise UnsupportedChannels(f"{path}: {n_channels} channels, expected mono")

    if audio_format == 1 and bits == 16:
        codes = np.frombuffer(payload, dtype="<i2")
        samples = codes.astype(np.float64) / PCM16_SCALE
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
        samples = np.clip(samples, -1.0, 1.0)
    else:
        raise UnsupportedEncoding(
            f"{path}: format tag {audio_format} at {bits} bit not supported"
        )
    if samples.size == 0:
        raise CorruptHeader(f"{path}: empty data chunk")
    return AudioSignal(samples, sample_rate)


def write_wav(path, signal: AudioSignal, encoding: str = "pcm16") -> None:
    """Write a mono WAV file ('pcm16' or 'float32'), atomically."""
    if encoding == "pcm16":
        codes = np.clip(
            np.rint(signal.samples * PCM16_SCALE), -32768, 32767
        ).astype("<i2")
        payload = codes.tobytes()
        audio_format, bits = 1, 16
    elif encoding == "float32":
        payload = signal.samples.astype("<f4").tobytes()
        audio_format, bits = 3, 32
    else:
        raise ValueError(f"unknown encoding {encoding!r}")

    block_align = bits // 8
    byte_rate = signal.sample_rate * block_align
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, audio_format, 1, signal.sample_rate, byte_rate,
        block_align, bits,
    )
    header += b"data" + struct.pack("<I", len(payload))
    write_bytes_atomic(path, header + payload)


def wav_duration_s(path) -> float:
    """Duration of a WAV file from its header, without decoding samples."""
    data = Path(path).read_bytes()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")
    fmt = None
    data_len = None
    for cid, body in _find_chunks(data):
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            data_len = len(body)
    if fmt is None or data_len is None or len(fmt) < 16:
        raise CorruptHeader(f"{path}: missing fmt or data chunk")
    _, _, sample_rate, _, block_align, _ = struct.unpack_from("<HHIIHH", fmt, 0)
    if block_align == 0:
        raise CorruptHeader(f"{path}: zero block align")
    return (data_len // block_align) / sample_rate


def resample(signal: AudioSignal, target_rate: int) -> AudioSignal:
    """Band-limited resampling; identity rate returns the input unchanged."""
    if target_rate < 8000:
        raise ValueError("target_rate must be >= 8000 Hz")
    if target_rate == signal.sample_rate:
        return signal
    ratio = Fraction(target_rate, signal.sample_rate)
    out = resample_poly(signal.samples, ratio.numerator, ratio.denominator)
    # polyphase filtering can overshoot slightly near edges
    out = np.clip(out, -1.0, 1.0)
    return AudioSignal(out, target_rate)


# --- cohort manifests ---


class Session(Enum):
    PRE = "pre"
    POST = "post"


class Gender(Enum):
    MALE = "m"
    FEMALE = "f"
    UNSPECIFIED = "u"


_SESSION_TOKENS = {"pre": Session.PRE, "post": Session.POST}
_GENDER_TOKENS = {
    "m": Gender.MALE, "male": Gender.MALE,
    "f": Gender.FEMALE, "female": Gender.FEMALE,
    "u": Gender.UNSPECIFIED, "unspecified": Gender.UNSPECIFIED,
    "": Gender.UNSPECIFIED,
}

PHRASE_KINDS = tuple(f"phrase{i}" for i in range(1, N_PHRASES + 1))
ALL_KINDS = VOWELS + PHRASE_KINDS
_KIND_ORDER = {k: i for i, k in enumerate(ALL_KINDS)}


def is_vowel_kind(kind: str) -> bool:
    return kind in VOWELS


@dataclass(frozen=True)
class Instance:
    """One recording: a vowel or a phrase of one speaker in one session."""

    speaker_id: str
    session: Session
    gender: Gender
    kind: str
    path: str

    def sort_key(self):
        return (
            self.speaker_id,
            0 if self.session is Session.PRE else 1,
            _KIND_ORDER[self.kind],
        )


@dataclass(frozen=True)
class CohortManifest:
    instances: tuple[Instance, ...]

    def speakers(self) -> list[str]:
        return sorted({i.speaker_id for i in self.instances})

    def genders(self) -> dict[str, Gender]:
        return {i.speaker_id: i.gender for i in self.instances}


def parse_manifest(path) -> CohortManifest:
    """Parse a manifest CSV into a validated, deterministically ordered cohort.

    Columns: speaker_id, session, gender, kind, path. Relative audio paths
    resolve against the manifest's directory. Rows are sorted by
    (speaker_id, session, kind) regardless of file order.
    """
    path = Path(path)
    base = path.parent
    instances = []
    seen = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"speaker_id", "session", "gender", "kind", "path"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise BadEnum(f"{path}: manifest header must contain {sorted(required)}")
        for row_no, row in enumerate(reader, start=2):
            session = _SESSION_TOKENS.get(row["session"].strip().lower())
            if session is None:
                raise BadEnum(f"{path} row {row_no}: unknown session {row['session']!r}")
            gender = _GENDER_TOKENS.get(row["gender"].strip().lower())
            if gender is None:
                raise BadEnum(f"{path} row {row_no}: unknown gender {row['gender']!r}")
            kind = row["kind"].strip().lower()
            if kind not in _KIND_ORDER:
                raise BadEnum(f"{path} row {row_no}: unknown kind {row['kind']!r}")
            speaker = row["speaker_id"].strip()
            if not speaker:
                raise BadEnum(f"{path} row {row_no}: empty speaker_id")
            key = (speaker, session, kind)
            if key in seen:
                raise DuplicateInstance(
                    f"{path} row {row_no}: duplicate instance {key}"
                )
            seen.add(key)
            audio_path = Path(row["path"].strip())
            if not audio_path.is_absolute():
                audio_path = base / audio_path
            if not audio_path.is_file():
                raise MissingFile(f"{path} row {row_no}: no such file {audio_path}")
            instances.append(
                Instance(speaker, session, gender, kind, str(audio_path))
            )
    instances.sort(key=Instance.sort_key)
    return CohortManifest(tuple(instances))


def write_manifest(path, instances) -> None:
    lines = ["speaker_id,session,gender,kind,path"]
    for inst in instances:
        lines.append(
            f"{inst.speaker_id},{inst.session.value},{inst.gender.value},"
            f"{inst.kind},{inst.path}"
        )
    write_text_atomic(path, "\n".join(lines) + "\n")


# --- atomic file helpers ---


def write_bytes_atomic(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text_atomic(path, text: str) -> None:
    write_bytes_atomic(path, text.encode("utf-8"))
