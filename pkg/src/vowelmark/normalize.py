"""Feature z-normalization: train-fitted (standard) or per-speaker."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SpeakerTooFewInstances, TooFewVectors


@dataclass
class NormParams:
    """Per-feature mean/std, either one pair or one pair per speaker.

    A zero std maps that feature to 0 on apply.
    """

    scope: str  # "standard" | "speaker"
    mean: np.ndarray | dict[str, np.ndarray]
    std: np.ndarray | dict[str, np.ndarray]
    n_features: int


def fit_standard(train_values: np.ndarray) -> NormParams:
    """Mean/std over the training rows only (population std)."""
    train_values = np.asarray(train_values, dtype=float)
    if train_values.ndim != 2 or train_values.shape[0] < 2:
        raise TooFewVectors("need at least 2 training vectors")
    return NormParams(
        scope="standard",
        mean=train_values.mean(axis=0).copy(),
        std=train_values.std(axis=0).copy(),
        n_features=train_values.shape[1],
    )


def fit_speaker(values: np.ndarray, speaker_ids) -> NormParams:
    """Per-speaker mean/std over all of each speaker's rows (both sessions)."""
    values = np.asarray(values, dtype=float)
    speaker_ids = list(speaker_ids)
    if values.ndim != 2 or len(speaker_ids) != values.shape[0]:
        raise DimensionMismatch("speaker_ids must align with rows")
    means: dict[str, np.ndarray] = {}
    stds: dict[str, np.ndarray] = {}
    for spk in sorted(set(speaker_ids)):
        rows = values[[i for i, s in enumerate(speaker_ids) if s == spk]]
        if rows.shape[0] < 2:
            raise SpeakerTooFewInstances(f"speaker {spk} has {rows.shape[0]} rows")
        means[spk] = rows.mean(axis=0)
        stds[spk] = rows.std(axis=0)
    return NormParams(
        scope="speaker", mean=means, std=stds, n_features=values.shape[1]
    )


def _z(x: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    safe = np.where(std > 0, std, 1.0)
    out = (x - mean) / safe
    return np.where(std > 0, out, 0.0)


def apply(params: NormParams, values: np.ndarray, speaker_ids=None) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != params.n_features:
        raise DimensionMismatch(
            f"expected {params.n_features} features, got {values.shape}"
        )
    if params.scope == "standard":
        return _z(values, params.mean, params.std)
    if speaker_ids is None or len(speaker_ids) != values.shape[0]:
        raise DimensionMismatch("speaker normalization needs aligned speaker_ids")
    out = np.empty_like(values)
    for i, spk in enumerate(speaker_ids):
        out[i] = _z(values[i], params.mean[spk], params.std[spk])
    return out


def denormalize(params: NormParams, values: np.ndarray, speaker_ids=None) -> np.ndarray:
    """Inverse of apply for non-constant features (std-0 columns stay 0)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != params.n_features:
        raise DimensionMismatch(
            f"expected {params.n_features} features, got {values.shape}"
        )
    if params.scope == "standard":
        return values * params.std + params.mean
    if speaker_ids is None or len(speaker_ids) != values.shape[0]:
        raise DimensionMismatch("speaker denormalization needs aligned speaker_ids")
    out = np.empty_like(values)
    for i, spk in enumerate(speaker_ids):
        out[i] = values[i] * params.std[spk] + params.mean[spk]
    return out
