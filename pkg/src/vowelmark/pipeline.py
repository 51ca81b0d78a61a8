"""Nested leave-one-speaker-out experiment engine.

Each speaker is held out exactly once. The remaining speakers split into
speaker-disjoint train/dev partitions by alternating over the id-sorted
list (per gender bucket when genders are known). The cost/kernel grid is
scored on the dev partition, the winning configuration retrains on
train+dev, and the held-out speaker's instances are predicted and
max-voted into one prediction per session.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import normalize, svm
from .audio_io import Gender, Session
from .errors import CoverageMismatch, MissingInstances, TooFewSpeakers
from .functionals import FeatureTable
from .stats import uar

LABEL_PRE = 1
LABEL_POST = -1


@dataclass(frozen=True)
class FoldPlan:
    test_speaker: str
    train_speakers: tuple[str, ...]
    dev_speakers: tuple[str, ...]


def plan_folds(speakers, genders: dict[str, Gender] | None = None) -> list[FoldPlan]:
    """One fold per speaker; remaining speakers alternate into train/dev.

    Alternation runs within each gender bucket when genders are known so
    both partitions stay roughly gender-balanced. If the alternation
    leaves dev empty, the last train speaker moves over.
    """
    speakers = sorted(speakers)
    if len(speakers) < 4:
        raise TooFewSpeakers(f"need at least 4 speakers, got {len(speakers)}")
    genders = genders or {}
    folds = []
    for test in speakers:
        rest = [s for s in speakers if s != test]
        known = {g for s in rest if (g := genders.get(s, Gender.UNSPECIFIED))
                 is not Gender.UNSPECIFIED}
        if known:
            buckets = [
                [s for s in rest if genders.get(s, Gender.UNSPECIFIED) is g]
                for g in (Gender.MALE, Gender.FEMALE, Gender.UNSPECIFIED)
            ]
        else:
            buckets = [rest]
        train: list[str] = []
        dev: list[str] = []
        for bucket in buckets:
            for i, s in enumerate(bucket):
                (train if i % 2 == 0 else dev).append(s)
        if not dev:
            dev.append(train.pop())
        folds.append(FoldPlan(test, tuple(sorted(train)), tuple(sorted(dev))))
    return folds


@dataclass
class InstancePrediction:
    kind: str
    predicted: int
    decision: float


@dataclass
class SessionPrediction:
    speaker_id: str
    session: Session
    gender: Gender
    truth: int
    predicted: int
    vote_margin: int
    mean_decision: float
    instance_predictions: list[InstancePrediction] = field(default_factory=list)


@dataclass
class FoldAudit:
    test_speaker: str
    test_rows: tuple[int, ...]
    fit_rows: tuple[int, ...]
    train_rows: tuple[int, ...]
    dev_rows: tuple[int, ...]
    test_fingerprint: str


@dataclass
class SystemOutput:
    system: str
    predictions: list[SessionPrediction]
    fold_configs: dict[str, svm.SvmConfig] = field(default_factory=dict)
    audits: list[FoldAudit] = field(default_factory=list)
    svm_backend: str = svm.BACKEND


def aggregate_session(instance_preds: list[tuple[int, float]]):
    """Max-vote instance predictions into one session label.

    Exact ties go to the side whose mean absolute decision value is
    larger; a remaining tie predicts pre-treatment.
    """
    if not instance_preds:
        raise ValueError("no instance predictions to aggregate")
    labels = np.array([p for p, _ in instance_preds])
    decisions = np.array([d for _, d in instance_preds])
    n_pre = int(np.sum(labels == LABEL_PRE))
    n_post = labels.size - n_pre
    if n_pre > n_post:
        predicted = LABEL_PRE
    elif n_post > n_pre:
        predicted = LABEL_POST
    else:
        s_pre = float(np.mean(np.abs(decisions[labels == LABEL_PRE]))) if n_pre else 0.0
        s_post = float(np.mean(np.abs(decisions[labels == LABEL_POST]))) if n_post else 0.0
        predicted = LABEL_PRE if s_pre >= s_post else LABEL_POST
    return predicted, abs(n_pre - n_post), float(decisions.mean())


def _session_groups(meta, idx):
    """Group row positions (into idx) by (speaker, session), sorted."""
    groups: dict[tuple[str, str], list[int]] = {}
    for pos, row in enumerate(idx):
        m = meta[row]
        groups.setdefault((m.speaker_id, m.session.value), []).append(pos)
    return dict(sorted(groups.items()))


def _session_truth(session_value: str) -> int:
    return LABEL_PRE if session_value == Session.PRE.value else LABEL_POST


def grid_search(Xtr, ytr, Xdev, ydev, dev_groups, grid=None,
                dev_metric: str = "session"):
    """Pick the config maximizing dev UAR; ties prefer lower cost, then
    linear < poly < rbf (the grid is pre-sorted that way)."""
    if grid is None:
        grid = svm.default_grid()
    best_cfg = None
    best_score = -np.inf
    n_trained = 0
    for cfg in grid:
        model = svm.train(Xtr, ytr, cfg)
        n_trained += 1
        dec = model.decision(Xdev)
        pred = np.where(dec >= 0.0, LABEL_PRE, LABEL_POST)
        if dev_metric == "instance":
            score = uar(pred, ydev)
        else:
            sess_pred = []
            sess_truth = []
            for (spk, sess), positions in dev_groups.items():
                agg, _, _ = aggregate_session(
                    [(int(pred[p]), float(dec[p])) for p in positions]
                )
                sess_pred.append(agg)
                sess_truth.append(_session_truth(sess))
            score = uar(np.array(sess_pred), np.array(sess_truth))
        if score > best_score:
            best_score = score
            best_cfg = cfg
    return best_cfg, best_score, n_trained


@dataclass
class _FoldTask:
    fold: FoldPlan
    values: np.ndarray          # raw or speaker-normalized feature matrix
    meta: tuple
    row_idx_by_speaker: dict[str, list[int]]
    norm: str
    dev_metric: str
    grid: tuple


def _run_fold(task: _FoldTask):
    fold = task.fold
    values = task.values
    meta = task.meta
    train_idx = [i for s in fold.train_speakers for i in task.row_idx_by_speaker[s]]
    dev_idx = [i for s in fold.dev_speakers for i in task.row_idx_by_speaker[s]]
    test_idx = list(task.row_idx_by_speaker[fold.test_speaker])
    fit_idx = sorted(train_idx + dev_idx)

    y_all = np.array([_session_truth(meta[i].session.value) for i in range(len(meta))])

    if task.norm == "standard":
        grid_params = normalize.fit_standard(values[train_idx])
        Xtr = normalize.apply(grid_params, values[train_idx])
        Xdev = normalize.apply(grid_params, values[dev_idx])
        fit_rows: tuple[int, ...] = tuple(fit_idx)
    else:
        Xtr = values[train_idx]
        Xdev = values[dev_idx]
        fit_rows = ()

    dev_groups = _session_groups(meta, dev_idx)
    best_cfg, _, _ = grid_search(
        Xtr, y_all[train_idx], Xdev, y_all[dev_idx], dev_groups,
        grid=task.grid, dev_metric=task.dev_metric,
    )

    if task.norm == "standard":
        final_params = normalize.fit_standard(values[fit_idx])
        Xfit = normalize.apply(final_params, values[fit_idx])
        Xtest = normalize.apply(final_params, values[test_idx])
    else:
        Xfit = values[fit_idx]
        Xtest = values[test_idx]

    model = svm.train(Xfit, y_all[fit_idx], best_cfg)
    dec = model.decision(Xtest)
    pred = np.where(dec >= 0.0, LABEL_PRE, LABEL_POST)

    sessions = []
    for (spk, sess), positions in _session_groups(meta, test_idx).items():
        inst = [
            InstancePrediction(
                kind=meta[test_idx[p]].kind,
                predicted=int(pred[p]),
                decision=float(dec[p]),
            )
            for p in positions
        ]
        agg, margin, mean_dec = aggregate_session(
            [(ip.predicted, ip.decision) for ip in inst]
        )
        sessions.append(SessionPrediction(
            speaker_id=spk,
            session=Session(sess),
            gender=meta[test_idx[positions[0]]].gender,
            truth=_session_truth(sess),
            predicted=agg,
            vote_margin=margin,
            mean_decision=mean_dec,
            instance_predictions=inst,
        ))

    audit = FoldAudit(
        test_speaker=fold.test_speaker,
        test_rows=tuple(sorted(test_idx)),
        fit_rows=fit_rows,
        train_rows=tuple(fit_idx),
        dev_rows=tuple(sorted(dev_idx)),
        test_fingerprint=hashlib.sha256(
            np.ascontiguousarray(values[sorted(test_idx)]).tobytes()
        ).hexdigest(),
    )
    return sessions, best_cfg, audit


def run_loso(table: FeatureTable, kind: str | None = "vowels",
             norm: str = "speaker", dev_metric: str = "session",
             jobs: int = 1, system: str = "system") -> SystemOutput:
    """Run the nested leave-one-speaker-out protocol on a feature table.

    kind selects rows first: "vowels", "phrases", "mpt" (vowel rows
    restricted to the mpt_seconds column), or None to use the table
    as passed.
    """
    if kind == "vowels":
        table = table.select_kind_group("vowels")
    elif kind == "phrases":
        table = table.select_kind_group("phrases")
    elif kind == "mpt":
        if "mpt_seconds" not in table.names:
            raise MissingInstances("table has no mpt_seconds column")
        table = table.select_kind_group("vowels").select_columns(["mpt_seconds"])
    elif kind is not None:
        raise ValueError(f"unknown kind {kind!r}")
    if norm not in ("standard", "speaker"):
        raise ValueError(f"unknown norm {norm!r}")
    if table.n_rows == 0:
        raise MissingInstances("no rows left after kind filtering")

    meta = table.meta
    row_idx_by_speaker: dict[str, list[int]] = {}
    for i, m in enumerate(meta):
        row_idx_by_speaker.setdefault(m.speaker_id, []).append(i)
    for spk, rows in row_idx_by_speaker.items():
        sessions = {meta[i].session for i in rows}
        if sessions != {Session.PRE, Session.POST}:
            raise MissingInstances(f"speaker {spk} lacks one session")

    values = table.values
    if norm == "speaker":
        params = normalize.fit_speaker(values, [m.speaker_id for m in meta])
        values = normalize.apply(params, values, [m.speaker_id for m in meta])

    folds = plan_folds(table.speakers(), table.genders())
    grid = svm.default_grid()
    tasks = [
        _FoldTask(fold, values, meta, row_idx_by_speaker, norm, dev_metric, grid)
        for fold in folds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_fold, tasks))
    else:
        results = [_run_fold(t) for t in tasks]

    predictions: list[SessionPrediction] = []
    fold_configs: dict[str, svm.SvmConfig] = {}
    audits: list[FoldAudit] = []
    for (sessions, cfg, audit), fold in zip(results, folds):
        predictions.extend(sessions)
        fold_configs[fold.test_speaker] = cfg
        audits.append(audit)
    predictions.sort(key=lambda p: (p.speaker_id, p.session.value != "pre"))
    return SystemOutput(
        system=system,
        predictions=predictions,
        fold_configs=fold_configs,
        audits=audits,
    )


def late_fuse(outputs: list[SystemOutput], system: str = "fusion") -> SystemOutput:
    """Max-vote session predictions across systems.

    Vote ties go to the side whose supporting systems carry the larger
    mean vote margin; a remaining tie predicts pre-treatment.
    """
    if len(outputs) < 2:
        raise ValueError("need at least two systems to fuse")
    keyed = []
    for out in outputs:
        d = {(p.speaker_id, p.session.value): p for p in out.predictions}
        if len(d) != len(out.predictions):
            raise CoverageMismatch(f"duplicate sessions in system {out.system}")
        keyed.append(d)
    keys = set(keyed[0])
    for out, d in zip(outputs[1:], keyed[1:]):
        if set(d) != keys:
            raise CoverageMismatch(
                f"system {out.system} covers different sessions"
            )

    fused = []
    for key in sorted(keys):
        members = [d[key] for d in keyed]
        truths = {m.truth for m in members}
        if len(truths) != 1:
            raise CoverageMismatch(f"systems disagree on truth for {key}")
        votes = np.array([m.predicted for m in members])
        n_pre = int(np.sum(votes == LABEL_PRE))
        n_post = votes.size - n_pre
        if n_pre > n_post:
            predicted = LABEL_PRE
        elif n_post > n_pre:
            predicted = LABEL_POST
        else:
            margins = np.array([m.vote_margin for m in members], dtype=float)
            s_pre = float(margins[votes == LABEL_PRE].mean()) if n_pre else 0.0
            s_post = float(margins[votes == LABEL_POST].mean()) if n_post else 0.0
            predicted = LABEL_PRE if s_pre >= s_post else LABEL_POST
        first = members[0]
        fused.append(SessionPrediction(
            speaker_id=first.speaker_id,
            session=first.session,
            gender=first.gender,
            truth=first.truth,
            predicted=predicted,
            vote_margin=abs(n_pre - n_post),
            mean_decision=float(np.mean([m.mean_decision for m in members])),
            instance_predictions=[
                InstancePrediction(
                    kind=out.system, predicted=m.predicted, decision=m.mean_decision
                )
                for out, m in zip(outputs, members)
            ],
        ))
    return SystemOutput(system=system, predictions=fused)
