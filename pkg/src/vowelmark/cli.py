"""Command line interface: synth, extract, run, fuse, rank, report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .audio_io import CohortManifest, is_vowel_kind, parse_manifest, write_text_atomic
from .errors import VowelmarkError
from .extract import build_mpt_table, extract_table
from .functionals import FeatureTable
from .pipeline import late_fuse, run_loso
from .report import (
    evaluate,
    load_report,
    render_table,
    report_to_system_output,
    save_report,
    svg_scatter,
)
from .segmentation import Part, Scheme, SegmentSpec
from .stats import rank_features, spearman_rho
from .synth import SPEC_PRESETS, CohortSpec, generate_cohort


def _add_segmentation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=["mismatched", "matched"],
                   default="mismatched")
    p.add_argument("--part", choices=["onset", "centre", "offset", "whole"],
                   default="whole")
    p.add_argument("--window", type=int, choices=[1, 2, 3], default=None)


def _segment_spec(parser: argparse.ArgumentParser, args) -> SegmentSpec:
    if args.window is not None and args.scheme != "matched":
        parser.error("--window requires --scheme matched")
    if args.scheme == "matched":
        if args.window is None:
            parser.error("--scheme matched requires --window")
        if args.part == "whole":
            parser.error("--part whole is only valid with --scheme mismatched")
    return SegmentSpec(Part(args.part), Scheme(args.scheme), args.window)


def _config_echo(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _kind_manifest(manifest: CohortManifest, kind: str) -> CohortManifest:
    want_vowels = kind in ("vowels", "mpt")
    return CohortManifest(tuple(
        i for i in manifest.instances if is_vowel_kind(i.kind) == want_vowels
    ))


def _default_system(args) -> str:
    if args.kind == "phrases":
        return "phrases"
    if args.kind == "mpt":
        return "mpt"
    label = f"vowels:{args.scheme}"
    if args.window is not None:
        label += f":{args.window}"
    return f"{label}:{args.part}"


def _build_table(parser, args) -> FeatureTable:
    manifest = parse_manifest(args.manifest)
    if args.kind == "mpt":
        return build_mpt_table(_kind_manifest(manifest, "mpt"))
    spec = _segment_spec(parser, args)
    return extract_table(_kind_manifest(manifest, args.kind), spec,
                         jobs=args.jobs)


def _cmd_synth(parser, args) -> int:
    if args.spec:
        spec = CohortSpec.from_json(Path(args.spec).read_text())
    else:
        spec = SPEC_PRESETS[args.preset](
            n_speakers=args.speakers, seed=args.seed, with_phrases=args.phrases
        )
    cohort = generate_cohort(spec, args.out)
    print(f"wrote {cohort.manifest_path} ({len(cohort.instances)} instances)")
    return 0


def _cmd_extract(parser, args) -> int:
    manifest = parse_manifest(args.manifest)
    spec = _segment_spec(parser, args)
    table = extract_table(manifest, spec, jobs=args.jobs,
                          dump_lld_dir=args.dump_lld)
    table.to_csv(args.out)
    print(f"wrote {args.out} ({table.n_rows} rows x {len(table.names)} features)")
    return 0


def _cmd_run(parser, args) -> int:
    if args.features:
        table = FeatureTable.from_csv(args.features)
    else:
        table = _build_table(parser, args)
    system = args.system or _default_system(args)
    output = run_loso(
        table,
        kind=args.kind,
        norm=args.norm,
        dev_metric=args.dev_metric,
        jobs=args.jobs,
        system=system,
    )
    config = _config_echo(args, (
        "manifest", "kind", "scheme", "part", "window", "norm",
        "seed", "n_boot", "dev_metric", "system",
    ))
    rep = evaluate(output, seed=args.seed, n_boot=args.n_boot, config=config)
    save_report(rep, args.out)
    lo, hi = rep.ci95
    print(f"{system}: SE_UAR={rep.se_uar:.3f} CI95=[{lo:.3f}, {hi:.3f}]")
    return 0


def _cmd_fuse(parser, args) -> int:
    reports = [load_report(p) for p in args.reports]
    outputs = [report_to_system_output(r) for r in reports]
    system = args.system or ("+".join(r.get("system", "?") for r in reports))
    fused = late_fuse(outputs, system=system)
    config = {
        "fused_reports": [str(p) for p in args.reports],
        "seed": args.seed,
        "n_boot": args.n_boot,
    }
    rep = evaluate(fused, seed=args.seed, n_boot=args.n_boot, config=config)
    save_report(rep, args.out)
    lo, hi = rep.ci95
    print(f"{system}: SE_UAR={rep.se_uar:.3f} CI95=[{lo:.3f}, {hi:.3f}]")
    return 0


def _cmd_rank(parser, args) -> int:
    if args.features:
        table = FeatureTable.from_csv(args.features)
    else:
        table = _build_table(parser, args)
    ranking = rank_features(
        table.select_kind_group("vowels") if args.kind == "vowels" else table,
        norm=args.norm,
        dev_metric=args.dev_metric,
        top_k=args.top_k,
        jobs=args.jobs,
    )
    payload = {
        "schema_version": 1,
        "config": _config_echo(args, (
            "manifest", "kind", "scheme", "part", "window", "norm", "top_k",
        )),
        "ranking": [fi.to_dict() for fi in ranking],
    }
    write_text_atomic(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    for fi in ranking:
        print(f"{fi.feature}: UAR={fi.single_feature_uar:.3f} "
              f"p={fi.p_value_two_sided:.4g} ({fi.direction})")
    return 0


def _cmd_report(parser, args) -> int:
    reports = [load_report(p) for p in args.reports]
    print(render_table(reports))
    if args.plot:
        if len(reports) != 2:
            parser.error("--plot needs exactly two reports to compare")
        a, b = reports[0]["sp_uar"], reports[1]["sp_uar"]
        common = sorted(set(a) & set(b))
        if len(common) < 3:
            parser.error("--plot needs at least 3 speakers common to both reports")
        points = {spk: (a[spk], b[spk]) for spk in common}
        svg = svg_scatter(
            points,
            x_label=f"SP_UAR {reports[0].get('system', 'A')}",
            y_label=f"SP_UAR {reports[1].get('system', 'B')}",
        )
        write_text_atomic(args.plot, svg + "\n")
        rho = spearman_rho(
            [a[s] for s in common], [b[s] for s in common]
        )
        print(f"speaker-level Spearman rho: {rho:.3f}")
        print(f"wrote {args.plot}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vowelmark",
        description="Sustained-vowel acoustic analysis pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--spec", help="cohort spec JSON (overrides --preset)")
    p.add_argument("--preset", choices=sorted(SPEC_PRESETS), default="strong")
    p.add_argument("--speakers", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phrases", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("extract", help="extract a feature table CSV")
    p.add_argument("--manifest", required=True)
    _add_segmentation_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dump-lld", default=None,
                   help="directory for per-frame descriptor CSV dumps")
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run the cross-validated experiment")
    p.add_argument("--manifest")
    p.add_argument("--features", help="precomputed feature table CSV")
    p.add_argument("--kind", choices=["vowels", "phrases", "mpt"],
                   default="vowels")
    _add_segmentation_flags(p)
    p.add_argument("--norm", choices=["standard", "speaker"], default="speaker")
    p.add_argument("--dev-metric", choices=["session", "instance"],
                   default="session")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-boot", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--system", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fuse", help="late-fuse two or more reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--system", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-boot", type=int, default=1000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rank", help="rank features by single-feature UAR")
    p.add_argument("--manifest")
    p.add_argument("--features", help="precomputed feature table CSV")
    p.add_argument("--kind", choices=["vowels"], default="vowels")
    _add_segmentation_flags(p)
    p.add_argument("--norm", choices=["standard", "speaker"], default="speaker")
    p.add_argument("--dev-metric", choices=["session", "instance"],
                   default="session")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="render report tables and plots")
    p.add_argument("reports", nargs="+")
    p.add_argument("--plot", default=None,
                   help="write an SVG speaker-level scatter (two reports)")
    return parser


_HANDLERS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "run": _cmd_run,
    "fuse": _cmd_fuse,
    "rank": _cmd_rank,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and not args.features and not args.manifest:
        parser.error("run needs --manifest or --features")
    if args.command == "rank" and not args.features and not args.manifest:
        parser.error("rank needs --manifest or --features")
    try:
        return _HANDLERS[args.command](parser, args)
    except (VowelmarkError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
