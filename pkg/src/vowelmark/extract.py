"""Manifest-to-feature-table extraction."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .audio_io import (
    CANONICAL_RATE,
    CohortManifest,
    Instance,
    is_vowel_kind,
    load_wav,
    resample,
    wav_duration_s,
    write_text_atomic,
)
from .functionals import REGISTRY, FeatureTable, FeatureVector, RowMeta, apply_functionals
from .lld import contours_to_csv_rows, extract_contours
from .segmentation import Part, Scheme, SegmentSpec, make_segment


def extract_instance(instance: Instance, spec: SegmentSpec) -> FeatureVector:
    """Load, resample to 16 kHz, cut, and featurize one instance.

    Phrase instances always pass through whole regardless of the
    requested vowel segmentation.
    """
    signal = resample(load_wav(instance.path), CANONICAL_RATE)
    if not is_vowel_kind(instance.kind):
        spec = SegmentSpec(Part.WHOLE, Scheme.MISMATCHED)
    segment = make_segment(signal, instance, spec)
    contours = extract_contours(segment.signal)
    return apply_functionals(contours, segment)


def _extract_one(args):
    instance, spec, dump_dir = args
    vec = extract_instance(instance, spec)
    if dump_dir is not None:
        signal = resample(load_wav(instance.path), CANONICAL_RATE)
        seg_spec = spec if is_vowel_kind(instance.kind) else SegmentSpec(
            Part.WHOLE, Scheme.MISMATCHED
        )
        segment = make_segment(signal, instance, seg_spec)
        rows = contours_to_csv_rows(extract_contours(segment.signal))
        name = f"{instance.speaker_id}_{instance.session.value}_{instance.kind}_lld.csv"
        write_text_atomic(Path(dump_dir) / name, "\n".join(rows) + "\n")
    return vec


def extract_table(manifest: CohortManifest, spec: SegmentSpec,
                  jobs: int = 1, dump_lld_dir=None) -> FeatureTable:
    """Extract the full feature table, one row per instance."""
    tasks = [(inst, spec, dump_lld_dir) for inst in manifest.instances]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            vectors = list(pool.map(_extract_one, tasks, chunksize=4))
    else:
        vectors = [_extract_one(t) for t in tasks]
    return FeatureTable.from_vectors(vectors)


def build_mpt_table(manifest: CohortManifest) -> FeatureTable:
    """Duration-only table for the phonation-time baseline (vowels only).

    Reads WAV headers instead of decoding audio; no DSP involved.
    """
    meta = []
    rows = []
    for inst in manifest.instances:
        if not is_vowel_kind(inst.kind):
            continue
        meta.append(RowMeta(
            speaker_id=inst.speaker_id,
            session=inst.session,
            gender=inst.gender,
            kind=inst.kind,
            part="whole",
            scheme="mpt",
        ))
        rows.append([wav_duration_s(inst.path)])
    return FeatureTable(("mpt_seconds",), tuple(meta), np.asarray(rows, dtype=float))
