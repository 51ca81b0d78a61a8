"""Evaluation reports: metrics, JSON schema, text table, SVG scatter."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import Gender, Session, write_text_atomic
from .errors import SingleClassTruths
from .pipeline import (
    InstancePrediction,
    SessionPrediction,
    SystemOutput,
)
from .stats import FeatureImportance, bootstrap_ci, speaker_uar, uar
from .svm import SvmConfig

SCHEMA_VERSION = 1

_SESSION_NAME = {1: "pre", -1: "post"}
_SESSION_LABEL = {"pre": 1, "post": -1}


@dataclass
class EvaluationReport:
    system: str
    se_uar: float
    ci95: tuple[float, float]
    male_uar: float | None
    female_uar: float | None
    sp_uar: dict[str, float]
    sessions: list[SessionPrediction]
    seed: int
    n_boot: int
    config: dict = field(default_factory=dict)
    fold_configs: dict = field(default_factory=dict)
    feature_ranking: list[FeatureImportance] | None = None
    svm_backend: str = ""

    def to_json_dict(self) -> dict:
        from . import __version__

        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {
                "name": "vowelmark",
                "version": __version__,
                "svm_backend": self.svm_backend,
            },
            "system": self.system,
            "config": self.config,
            "seed": self.seed,
            "n_boot": self.n_boot,
            "se_uar": self.se_uar,
            "ci95": list(self.ci95),
            "male_uar": self.male_uar,
            "female_uar": self.female_uar,
            "sp_uar": self.sp_uar,
            "fold_configs": self.fold_configs,
            "sessions": [
                {
                    "speaker_id": s.speaker_id,
                    "session": s.session.value,
                    "gender": s.gender.value,
                    "truth": _SESSION_NAME[s.truth],
                    "predicted": _SESSION_NAME[s.predicted],
                    "vote_margin": s.vote_margin,
                    "mean_decision": s.mean_decision,
                    "instances": [
                        {
                            "kind": ip.kind,
                            "predicted": _SESSION_NAME[ip.predicted],
                            "decision": ip.decision,
                        }
                        for ip in s.instance_predictions
                    ],
                }
                for s in self.sessions
            ],
            "feature_ranking": (
                [fi.to_dict() for fi in self.feature_ranking]
                if self.feature_ranking is not None
                else None
            ),
        }


def _stratum_uar(preds: list[SessionPrediction], gender: Gender) -> float | None:
    sel = [p for p in preds if p.gender is gender]
    if not sel:
        return None
    try:
        return uar(
            np.array([p.predicted for p in sel]),
            np.array([p.truth for p in sel]),
        )
    except SingleClassTruths:
        return None


def evaluate(output: SystemOutput, seed: int = 0, n_boot: int = 1000,
             config: dict | None = None,
             feature_ranking: list[FeatureImportance] | None = None) -> EvaluationReport:
    """Score one system: session UAR, bootstrap CI, strata, speaker UARs."""
    preds = output.predictions
    y_pred = np.array([p.predicted for p in preds])
    y_true = np.array([p.truth for p in preds])
    se = uar(y_pred, y_true)
    ci = bootstrap_ci(y_pred, y_true, n_boot=n_boot, seed=seed)

    records = [
        (p.speaker_id, ip.predicted, p.truth)
        for p in preds
        for ip in p.instance_predictions
    ]
    sp = speaker_uar(records) if records else {}

    return EvaluationReport(
        system=output.system,
        se_uar=se,
        ci95=ci,
        male_uar=_stratum_uar(preds, Gender.MALE),
        female_uar=_stratum_uar(preds, Gender.FEMALE),
        sp_uar=sp,
        sessions=preds,
        seed=seed,
        n_boot=n_boot,
        config=config or {},
        fold_configs={
            spk: {"cost": cfg.cost, "kernel": cfg.kernel}
            for spk, cfg in output.fold_configs.items()
        },
        feature_ranking=feature_ranking,
        svm_backend=output.svm_backend,
    )


def save_report(report: EvaluationReport, path) -> None:
    text = json.dumps(report.to_json_dict(), indent=2, sort_keys=True)
    write_text_atomic(path, text + "\n")


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


def report_to_system_output(report: dict) -> SystemOutput:
    """Rebuild the session predictions of a saved report (for fusion)."""
    sessions = []
    for s in report["sessions"]:
        sessions.append(SessionPrediction(
            speaker_id=s["speaker_id"],
            session=Session(s["session"]),
            gender=Gender(s["gender"]),
            truth=_SESSION_LABEL[s["truth"]],
            predicted=_SESSION_LABEL[s["predicted"]],
            vote_margin=int(s["vote_margin"]),
            mean_decision=float(s["mean_decision"]),
            instance_predictions=[
                InstancePrediction(
                    kind=ip["kind"],
                    predicted=_SESSION_LABEL[ip["predicted"]],
                    decision=float(ip["decision"]),
                )
                for ip in s["instances"]
            ],
        ))
    return SystemOutput(
        system=report.get("system", "system"),
        predictions=sessions,
        svm_backend=report.get("tool", {}).get("svm_backend", ""),
    )


def _pct(x: float | None) -> str:
    return "--" if x is None else f"{100.0 * x:.0f}"


def render_table(reports: list[dict]) -> str:
    """Plain-text results table: one row per report."""
    rows = [("System", "SE_UAR [CI95]", "M/F UAR")]
    for rep in reports:
        lo, hi = rep["ci95"]
        rows.append((
            rep.get("system", "?"),
            f"{_pct(rep['se_uar'])} [{_pct(lo)}-{_pct(hi)}]",
            f"{_pct(rep.get('male_uar'))}/{_pct(rep.get('female_uar'))}",
        ))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = []
    for i, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 4))
    return "\n".join(lines)


def svg_scatter(points: dict[str, tuple[float, float]],
                x_label: str, y_label: str) -> str:
    """Speaker-level comparison scatter on [0, 1] x [0, 1] axes."""
    size, margin = 420, 50
    span = size - 2 * margin

    def sx(v: float) -> float:
        return margin + v * span

    def sy(v: float) -> float:
        return size - margin - v * span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{span}" height="{span}" '
        'fill="none" stroke="black"/>',
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(1)}" '
        'stroke="#bbbbbb" stroke-dasharray="4 3"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<text x="{sx(tick):.1f}" y="{size - margin + 18:.1f}" '
            f'font-size="11" text-anchor="middle">{tick:g}</text>'
        )
        parts.append(
            f'<text x="{margin - 8:.1f}" y="{sy(tick) + 4:.1f}" '
            f'font-size="11" text-anchor="end">{tick:g}</text>'
        )
    for spk in sorted(points):
        x, y = points[spk]
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" '
            'fill="#336699" fill-opacity="0.7"><title>'
            f"{spk}</title></circle>"
        )
    parts.append(
        f'<text x="{size / 2:.1f}" y="{size - 12}" font-size="13" '
        f'text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{size / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {size / 2:.1f})">{y_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)
