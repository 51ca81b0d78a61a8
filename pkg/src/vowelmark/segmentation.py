"""Temporal segmentation of vowel recordings.

Two schemes: proportional thirds of whatever was recorded (durations
differ between recordings), and fixed-duration windows of w seconds cut
from the onset, centre, and offset (short recordings are mirror-padded
up to w first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .audio_io import AudioSignal, Instance

MATCHED_WINDOWS_S = (1, 2, 3)


class Part(Enum):
    ONSET = "onset"
    CENTRE = "centre"
    OFFSET = "offset"
    WHOLE = "whole"


class Scheme(Enum):
    MISMATCHED = "mismatched"
    MATCHED = "matched"


@dataclass(frozen=True)
class SegmentSpec:
    part: Part
    scheme: Scheme
    window_s: int | None = None

    def __post_init__(self):
        if self.scheme is Scheme.MATCHED:
            if self.window_s not in MATCHED_WINDOWS_S:
                raise ValueError("matched scheme needs window_s in {1, 2, 3}")
            if self.part is Part.WHOLE:
                raise ValueError("whole part is only valid for the mismatched scheme")
        elif self.window_s is not None:
            raise ValueError("window_s only applies to the matched scheme")

    def label(self) -> str:
        if self.scheme is Scheme.MATCHED:
            return f"matched:{self.window_s}"
        return "mismatched"


@dataclass(frozen=True)
class Segment:
    """A cut of one instance, remembering the uncut recording's duration."""

    signal: AudioSignal
    source: Instance | None
    spec: SegmentSpec
    source_duration_s: float


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def segment_mismatched(signal: AudioSignal):
    """Split into proportional thirds at floor(L/3) and floor(2L/3) samples.

    The three parts tile the input exactly: concatenating them restores it.
    """
    x = signal.samples
    n = x.size
    b1 = n // 3
    b2 = (2 * n) // 3
    rate = signal.sample_rate
    return (
        AudioSignal(x[:b1], rate) if b1 > 0 else None,
        AudioSignal(x[b1:b2], rate) if b2 > b1 else None,
        AudioSignal(x[b2:], rate),
    )


def _reflect_indices(n_out: int, n_in: int) -> np.ndarray:
    # reflection about the end samples without repeating them; period 2L-2
    idx = np.arange(n_out)
    if n_in == 1:
        return np.zeros(n_out, dtype=int)
    period = 2 * n_in - 2
    j = idx % period
    return np.where(j < n_in, j, period - j)


def mirror_pad(signal: AudioSignal, target_len_samples: int) -> AudioSignal:
    """Extend to the target length by alternating boundary-free reflection.

    [1,2,3] padded to 8 becomes [1,2,3,2,1,2,3,2]; padding permutes
    existing sample values, it never invents new ones.
    """
    n = len(signal)
    if target_len_samples < n:
        raise ValueError("target length must be >= current length")
    if target_len_samples == n:
        return signal
    idx = _reflect_indices(target_len_samples, n)
    return AudioSignal(signal.samples[idx], signal.sample_rate)


def segment_matched(signal: AudioSignal, window_s: int):
    """Cut fixed-duration onset/centre/offset windows of exactly window_s.

    A recording shorter than the window is mirror-padded to the window
    length, in which case all three windows coincide with the padded
    signal. The centre window starts at the half-up rounding of
    (N - W) / 2 samples; windows may overlap when the recording is short.
    """
    if window_s not in MATCHED_WINDOWS_S:
        raise ValueError("window_s must be one of {1, 2, 3} seconds")
    rate = signal.sample_rate
    w = round_half_up(window_s * rate)
    x = signal.samples
    n = x.size
    if n < w:
        padded = mirror_pad(signal, w)
        return padded, padded, padded
    onset = AudioSignal(x[:w], rate)
    c0 = round_half_up((n - w) / 2)
    centre = AudioSignal(x[c0:c0 + w], rate)
    offset = AudioSignal(x[n - w:], rate)
    return onset, centre, offset


def cut(signal: AudioSignal, spec: SegmentSpec) -> AudioSignal:
    """Extract the part named by the spec; Whole passes through unchanged."""
    if spec.part is Part.WHOLE:
        return signal
    if spec.scheme is Scheme.MISMATCHED:
        onset, centre, offset = segment_mismatched(signal)
    else:
        onset, centre, offset = segment_matched(signal, spec.window_s)
    part = {Part.ONSET: onset, Part.CENTRE: centre, Part.OFFSET: offset}[spec.part]
    if part is None:
        raise ValueError("signal too short to produce the requested third")
    return part


def make_segment(signal: AudioSignal, instance: Instance | None,
                 spec: SegmentSpec) -> Segment:
    return Segment(
        signal=cut(signal, spec),
        source=instance,
        spec=spec,
        source_duration_s=signal.duration_s,
    )
