"""Evaluation statistics: UAR, bootstrap CIs, rank tests, feature ranking.

The Mann-Whitney test uses an exact null distribution (dynamic program
over pooled midranks, which respects ties) whenever |a|*|b| is at most
EXACT_MW_LIMIT, and a tie-corrected normal approximation with continuity
correction otherwise.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SingleClassTruths, ZeroVariance

EXACT_MW_LIMIT = 400


def uar(predicted, truth) -> float:
    """Unweighted average recall over the two classes (+1 pre, -1 post)."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must align")
    recalls = []
    for cls in (1, -1):
        sel = truth == cls
        if not np.any(sel):
            raise SingleClassTruths(f"no class {cls} in truths")
        recalls.append(float(np.mean(predicted[sel] == cls)))
    return float(np.mean(recalls))


def bootstrap_ci(predicted, truth, n_boot: int = 1000, seed: int = 0):
    """Percentile bootstrap 95% CI of UAR over prediction records.

    Resamples records with replacement; replicates that lose one class
    are skipped. Uses linear-interpolation percentiles 2.5/97.5.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    n = predicted.size
    if n < 2:
        raise ValueError("need at least 2 records")
    uar(predicted, truth)  # validates both classes present
    rng = np.random.default_rng(seed)
    reps = []
    for _ in range(n_boot):
        idx = rng.integers(0, n, n)
        t = truth[idx]
        if np.all(t == t[0]):
            continue
        reps.append(uar(predicted[idx], t))
    if not reps:
        raise SingleClassTruths("every bootstrap replicate was single-class")
    lo, hi = np.percentile(reps, [2.5, 97.5])
    return float(lo), float(hi)


def speaker_uar(records) -> dict[str, float]:
    """Per-speaker UAR over instance-level (speaker, predicted, truth) records."""
    by_speaker: dict[str, list[tuple[int, int]]] = {}
    for spk, pred, tr in records:
        by_speaker.setdefault(spk, []).append((pred, tr))
    out = {}
    for spk in sorted(by_speaker):
        pairs = by_speaker[spk]
        preds = np.array([p for p, _ in pairs])
        truths = np.array([t for _, t in pairs])
        try:
            out[spk] = uar(preds, truths)
        except SingleClassTruths as exc:
            raise SingleClassTruths(f"speaker {spk}: {exc}") from exc
    return out


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sv = values[order]
    i = 0
    n = values.size
    while i < n:
        j = i
        while j + 1 < n and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Pearson correlation of midranks (ties averaged)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise ValueError("need equal-length sequences of at least 3")
    rx = _midranks(x)
    ry = _midranks(y)
    sx = rx.std()
    sy = ry.std()
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("constant sequence has no rank correlation")
    return float(np.mean((rx - rx.mean()) * (ry - ry.mean())) / (sx * sy))


def _exact_mw_p(scaled_ranks: np.ndarray, n1: int, obs_scaled: int) -> float:
    total_sum = int(scaled_ranks.sum())
    # ways[k, s] = number of k-subsets of the pooled ranks with scaled sum s
    ways = np.zeros((n1 + 1, total_sum + 1), dtype=np.float64)
    ways[0, 0] = 1.0
    for r in scaled_ranks:
        r = int(r)
        for k in range(n1, 0, -1):
            ways[k, r:] += ways[k - 1, :total_sum + 1 - r]
    dist = ways[n1]
    total = dist.sum()
    c_le = dist[:obs_scaled + 1].sum()
    c_ge = dist[obs_scaled:].sum()
    return min(1.0, 2.0 * min(c_le, c_ge) / total)


def mann_whitney_two_sided(a, b, method: str = "auto") -> tuple[float, float]:
    """Mann-Whitney U (for sample a) with a two-sided p-value.

    Exact path: full enumeration of the rank-sum distribution over all
    C(n, n1) assignments of the pooled midranks. Approximate path:
    normal with tie and continuity corrections. "auto" picks exact while
    |a|*|b| <= EXACT_MW_LIMIT.
    """
    if method not in ("auto", "exact", "approx"):
        raise ValueError(f"unknown method {method!r}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0

    if method == "exact" or (method == "auto" and n1 * n2 <= EXACT_MW_LIMIT):
        scaled = np.rint(2.0 * ranks).astype(np.int64)
        obs = int(round(2.0 * r1))
        p = _exact_mw_p(scaled, n1, obs)
        return u1, p

    n = n1 + n2
    mu = n1 * n2 / 2.0
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(((counts**3) - counts).sum()) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return u1, 1.0
    diff = u1 - mu
    cc = 0.5 if diff > 0 else (-0.5 if diff < 0 else 0.0)
    z = (diff - cc) / math.sqrt(var)
    p = min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))
    return u1, p


@dataclass
class FeatureImportance:
    feature: str
    single_feature_uar: float
    mw_u_statistic: float
    p_value_two_sided: float
    direction: str  # "higher_pre" | "higher_post"

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "single_feature_uar": self.single_feature_uar,
            "mw_u_statistic": self.mw_u_statistic,
            "p_value_two_sided": self.p_value_two_sided,
            "direction": self.direction,
        }


def _rank_one(args):
    table, feature, norm, dev_metric = args
    from .pipeline import run_loso

    sub = table.select_columns([feature])
    out = run_loso(sub, kind=None, norm=norm, dev_metric=dev_metric,
                   system=feature, jobs=1)
    preds = np.array([p.predicted for p in out.predictions])
    truths = np.array([p.truth for p in out.predictions])
    se = uar(preds, truths)

    col = sub.values[:, 0]
    labels = sub.labels()
    pre_vals = col[labels == 1]
    post_vals = col[labels == -1]
    u, p = mann_whitney_two_sided(pre_vals, post_vals)
    direction = (
        "higher_post"
        if np.median(post_vals) > np.median(pre_vals)
        else "higher_pre"
    )
    return FeatureImportance(feature, se, u, p, direction)


def rank_features(table, norm: str = "speaker", dev_metric: str = "session",
                  top_k: int = 5, jobs: int = 1) -> list[FeatureImportance]:
    """Train the full cross-validated pipeline on each feature in isolation.

    Features are ranked by their single-feature session UAR; ties keep
    table column order. Returns the top_k entries.
    """
    tasks = [(table, name, norm, dev_metric) for name in table.names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_rank_one, tasks))
    else:
        results = [_rank_one(t) for t in tasks]
    order = sorted(
        range(len(results)),
        key=lambda i: (-results[i].single_feature_uar, i),
    )
    return [results[i] for i in order[:top_k]]
