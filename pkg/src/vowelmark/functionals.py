"""Functionals: reduce descriptor contours to a fixed named feature vector.

The registry enumerates 88 features built from the 18 contour tracks:

* mean and coefficient of variation for every track,
* voiced-only / unvoiced-only means for the six always-defined tracks,
* distribution statistics (percentiles 20/50/80, their range, min, max)
  for F0 and loudness,
* rising/falling slope statistics between consecutive local extrema for
  F0 and loudness (dB/s resp. Hz/s),
* percentile blocks for jitter, shimmer, and HNR,
* temporal voicing statistics and the source recording duration.

Feature order is fixed at import time and shared by every vector, table,
and serialized header. All values are finite: empty domains produce 0
and set the degenerate flag on the vector.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import (
    Gender,
    Session,
    Instance,
    is_vowel_kind,
    write_text_atomic,
)
from .errors import DimensionMismatch, NotAVowel
from .lld import TRACK_NAMES, UNVOICED_OK_TRACKS, LldContours
from .segmentation import Segment

CV_MEAN_GUARD = 1e-6
MIN_VOICED_RUN_FRAMES = 3

_DISTRIBUTION_TRACKS = ("f0", "loudness")
_SLOPE_TRACKS = ("f0", "loudness")
_PERTURBATION_TRACKS = ("jitter", "shimmer", "hnr")
_TEMPORAL_FEATURES = (
    "mean_voiced_seg_len",
    "std_voiced_seg_len",
    "voiced_segs_per_sec",
    "mean_unvoiced_seg_len",
    "std_unvoiced_seg_len",
    "voiced_fraction",
)


def _build_registry() -> tuple[str, ...]:
    names: list[str] = []
    for t in TRACK_NAMES:
        names += [f"mean_{t}", f"cv_{t}"]
    for t in UNVOICED_OK_TRACKS:
        names += [f"mean_{t}_v", f"mean_{t}_uv"]
    for t in _DISTRIBUTION_TRACKS:
        names += [
            f"{t}_pctl20", f"{t}_pctl50", f"{t}_pctl80",
            f"{t}_pctl_range_20_80", f"{t}_min", f"{t}_max",
        ]
    for t in _SLOPE_TRACKS:
        names += [
            f"mean_{t}_rising_slope", f"std_{t}_rising_slope",
            f"mean_{t}_falling_slope", f"std_{t}_falling_slope",
        ]
    for t in _PERTURBATION_TRACKS:
        names += [
            f"{t}_pctl20", f"{t}_pctl50", f"{t}_pctl80",
            f"{t}_pctl_range_20_80",
        ]
    names += list(_TEMPORAL_FEATURES)
    names += ["equivalent_sound_level_db", "mpt_seconds"]
    return tuple(names)


REGISTRY: tuple[str, ...] = _build_registry()
REGISTRY_INDEX = {name: i for i, name in enumerate(REGISTRY)}


@dataclass
class FeatureVector:
    values: np.ndarray
    segment: Segment | None = None
    voiced_empty: bool = False

    def __post_init__(self):
        if self.values.shape != (len(REGISTRY),):
            raise DimensionMismatch(
                f"expected {len(REGISTRY)} features, got {self.values.shape}"
            )

    def __getitem__(self, name: str) -> float:
        return float(self.values[REGISTRY_INDEX[name]])


def mpt(segment: Segment) -> float:
    """Duration of the full, unsegmented vowel recording in seconds."""
    if segment.source is not None and not is_vowel_kind(segment.source.kind):
        raise NotAVowel(f"{segment.source.kind} is not a vowel instance")
    return segment.source_duration_s


def _finite(track: np.ndarray) -> np.ndarray:
    return track[np.isfinite(track)]


def _mean(vals: np.ndarray) -> float:
    return float(vals.mean()) if vals.size else 0.0


def _cv(vals: np.ndarray) -> float:
    if vals.size == 0:
        return 0.0
    m = vals.mean()
    if abs(m) < CV_MEAN_GUARD:
        return 0.0
    return float(vals.std() / abs(m))


def _percentile_block(vals: np.ndarray) -> tuple[float, float, float, float]:
    if vals.size == 0:
        return 0.0, 0.0, 0.0, 0.0
    p20, p50, p80 = np.percentile(vals, [20, 50, 80])
    return float(p20), float(p50), float(p80), float(p80 - p20)


def _extrema_positions(v: np.ndarray) -> list[int]:
    d = np.sign(np.diff(v))
    positions = [0]
    cur = 0.0
    for i, s in enumerate(d):
        if s == 0:
            continue
        if cur == 0:
            cur = s
        elif s != cur:
            positions.append(i)
            cur = s
    positions.append(v.size - 1)
    return positions


def _run_slopes(v: np.ndarray, hop_s: float, rising: list, falling: list) -> None:
    if v.size < 2:
        return
    pos = _extrema_positions(v)
    for i, j in zip(pos[:-1], pos[1:]):
        if j <= i:
            continue
        dv = v[j] - v[i]
        if dv == 0:
            continue
        slope = dv / ((j - i) * hop_s)
        (rising if dv > 0 else falling).append(slope)


def _slope_stats(track: np.ndarray, hop_s: float) -> tuple[float, float, float, float]:
    """Mean/std of local minimum-to-maximum (and max-to-min) slopes.

    Computed per contiguous defined run so gaps never contribute a slope.
    """
    rising: list[float] = []
    falling: list[float] = []
    defined = np.isfinite(track)
    t = 0
    n = track.size
    while t < n:
        if not defined[t]:
            t += 1
            continue
        end = t
        while end + 1 < n and defined[end + 1]:
            end += 1
        _run_slopes(track[t:end + 1], hop_s, rising, falling)
        t = end + 1
    r = np.asarray(rising)
    f = np.asarray(falling)
    return (
        _mean(r), float(r.std()) if r.size else 0.0,
        _mean(f), float(f.std()) if f.size else 0.0,
    )


def merged_voicing_mask(voiced: np.ndarray) -> np.ndarray:
    """Drop voiced runs shorter than MIN_VOICED_RUN_FRAMES frames."""
    out = voiced.copy()
    t = 0
    n = voiced.size
    while t < n:
        if not voiced[t]:
            t += 1
            continue
        end = t
        while end + 1 < n and voiced[end + 1]:
            end += 1
        if end - t + 1 < MIN_VOICED_RUN_FRAMES:
            out[t:end + 1] = False
        t = end + 1
    return out


def _run_lengths(mask: np.ndarray) -> list[int]:
    lengths = []
    t = 0
    n = mask.size
    while t < n:
        if not mask[t]:
            t += 1
            continue
        end = t
        while end + 1 < n and mask[end + 1]:
            end += 1
        lengths.append(end - t + 1)
        t = end + 1
    return lengths


def apply_functionals(contours: LldContours, segment: Segment) -> FeatureVector:
    """Compute the full registry for one segment's contours."""
    hop_s = contours.grid.hop_s
    voiced = contours.voiced
    feats: dict[str, float] = {}
    voiced_empty = not bool(voiced.any())

    for t in TRACK_NAMES:
        vals = _finite(contours.tracks[t])
        feats[f"mean_{t}"] = _mean(vals)
        feats[f"cv_{t}"] = _cv(vals)

    for t in UNVOICED_OK_TRACKS:
        track = contours.tracks[t]
        feats[f"mean_{t}_v"] = _mean(_finite(track[voiced]))
        feats[f"mean_{t}_uv"] = _mean(_finite(track[~voiced]))

    for t in _DISTRIBUTION_TRACKS:
        vals = _finite(contours.tracks[t])
        p20, p50, p80, rng = _percentile_block(vals)
        feats[f"{t}_pctl20"] = p20
        feats[f"{t}_pctl50"] = p50
        feats[f"{t}_pctl80"] = p80
        feats[f"{t}_pctl_range_20_80"] = rng
        feats[f"{t}_min"] = float(vals.min()) if vals.size else 0.0
        feats[f"{t}_max"] = float(vals.max()) if vals.size else 0.0

    for t in _SLOPE_TRACKS:
        mr, sr, mf, sf = _slope_stats(contours.tracks[t], hop_s)
        feats[f"mean_{t}_rising_slope"] = mr
        feats[f"std_{t}_rising_slope"] = sr
        feats[f"mean_{t}_falling_slope"] = mf
        feats[f"std_{t}_falling_slope"] = sf

    for t in _PERTURBATION_TRACKS:
        p20, p50, p80, rng = _percentile_block(_finite(contours.tracks[t]))
        feats[f"{t}_pctl20"] = p20
        feats[f"{t}_pctl50"] = p50
        feats[f"{t}_pctl80"] = p80
        feats[f"{t}_pctl_range_20_80"] = rng

    mask = merged_voicing_mask(voiced)
    v_lens = np.asarray(_run_lengths(mask), dtype=float) * hop_s
    u_lens = np.asarray(_run_lengths(~mask), dtype=float) * hop_s
    dur = max(contours.duration_s, 1e-9)
    feats["mean_voiced_seg_len"] = _mean(v_lens)
    feats["std_voiced_seg_len"] = float(v_lens.std()) if v_lens.size else 0.0
    feats["voiced_segs_per_sec"] = v_lens.size / dur
    feats["mean_unvoiced_seg_len"] = _mean(u_lens)
    feats["std_unvoiced_seg_len"] = float(u_lens.std()) if u_lens.size else 0.0
    feats["voiced_fraction"] = float(mask.mean())

    loud = contours.tracks["loudness"]
    feats["equivalent_sound_level_db"] = float(
        10.0 * np.log10(np.mean(10.0 ** (loud / 10.0)) + 1e-30)
    )
    feats["mpt_seconds"] = segment.source_duration_s

    values = np.array([feats[name] for name in REGISTRY])
    assert np.all(np.isfinite(values)), "non-finite feature value"
    return FeatureVector(values=values, segment=segment, voiced_empty=voiced_empty)


# --- feature tables ---


@dataclass(frozen=True)
class RowMeta:
    speaker_id: str
    session: Session
    gender: Gender
    kind: str
    part: str
    scheme: str

    @classmethod
    def for_segment(cls, segment: Segment) -> "RowMeta":
        inst = segment.source
        return cls(
            speaker_id=inst.speaker_id,
            session=inst.session,
            gender=inst.gender,
            kind=inst.kind,
            part=segment.spec.part.value,
            scheme=segment.spec.label(),
        )


@dataclass
class FeatureTable:
    """Feature matrix with per-row provenance; one row per instance part."""

    names: tuple[str, ...]
    meta: tuple[RowMeta, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.meta), len(self.names)):
            raise DimensionMismatch("values shape does not match meta/names")

    @property
    def n_rows(self) -> int:
        return len(self.meta)

    def speakers(self) -> list[str]:
        return sorted({m.speaker_id for m in self.meta})

    def genders(self) -> dict[str, Gender]:
        return {m.speaker_id: m.gender for m in self.meta}

    def labels(self) -> np.ndarray:
        """+1 for pre-treatment rows, -1 for post-treatment rows."""
        return np.array(
            [1 if m.session is Session.PRE else -1 for m in self.meta]
        )

    def select_rows(self, idx) -> "FeatureTable":
        idx = np.asarray(idx)
        return FeatureTable(
            self.names,
            tuple(self.meta[int(i)] for i in idx),
            self.values[idx],
        )

    def select_kind_group(self, group: str) -> "FeatureTable":
        if group == "vowels":
            keep = [i for i, m in enumerate(self.meta) if is_vowel_kind(m.kind)]
        elif group == "phrases":
            keep = [i for i, m in enumerate(self.meta) if not is_vowel_kind(m.kind)]
        else:
            raise ValueError(f"unknown kind group {group!r}")
        return self.select_rows(keep)

    def select_columns(self, names) -> "FeatureTable":
        idx = [self.names.index(n) for n in names]
        return FeatureTable(tuple(names), self.meta, self.values[:, idx])

    def to_csv(self, path) -> None:
        lines = [
            "speaker_id,session,gender,kind,part,scheme," + ",".join(self.names)
        ]
        for m, row in zip(self.meta, self.values):
            vals = ",".join(f"{v:.17g}" for v in row)
            lines.append(
                f"{m.speaker_id},{m.session.value},{m.gender.value},"
                f"{m.kind},{m.part},{m.scheme},{vals}"
            )
        write_text_atomic(path, "\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "FeatureTable":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            names = tuple(header[6:])
            meta = []
            rows = []
            for rec in reader:
                meta.append(RowMeta(
                    speaker_id=rec[0],
                    session=Session(rec[1]),
                    gender=Gender(rec[2]),
                    kind=rec[3],
                    part=rec[4],
                    scheme=rec[5],
                ))
                rows.append([float(v) for v in rec[6:]])
        return cls(names, tuple(meta), np.asarray(rows, dtype=float))

    @classmethod
    def from_vectors(cls, vectors: list[FeatureVector]) -> "FeatureTable":
        meta = tuple(RowMeta.for_segment(v.segment) for v in vectors)
        values = np.vstack([v.values for v in vectors])
        return cls(tuple(REGISTRY), meta, values)
