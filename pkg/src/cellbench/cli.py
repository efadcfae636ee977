"""Command-line front end: evaluate, rank, stability, decode.

Wires ingestion through metrics, ranking, statistics and reporting. All
outputs are written atomically (temp file + rename) and embed the config
they were produced with; identical inputs, flags and seed give byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io as cbio
from .labelmap import load_label_map, save_label_map, filter_small_cells
from .metrics import MatchConfig, match_instances, precision_recall_f1
from .ranking import (
    DEFAULT_ALPHA,
    RankingTable,
    RunRecord,
    SCHEMES,
    build_leaderboard,
    per_case_ranks,
)
from .stats import BootstrapConfig, bootstrap_ranking_stability, significance_matrix
from .decoders import (
    decode_flow_field,
    decode_fourier_contours,
    distance_elevation,
    distance_markers,
    marker_watershed,
    polygon_nms,
    rasterize_star_polygons,
)

log = logging.getLogger("cellbench")

SCHEMA_VERSION = 1

IMAGE_SUFFIXES = (".png", ".tif", ".tiff")

_BOUNDARY_FLAG = {"both": "both", "gt": "gt_only", "none": "none"}
_RUNTIME_FLAG = {"subtract": "subtract_floor", "cap": "hard_cap"}

METRICS_FIELDS = [
    "image_id",
    "tp",
    "fp",
    "fn",
    "precision",
    "recall",
    "f1",
    "runtime_seconds",
    "pixel_count",
]


def _write_text_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _dump_json(path: str, payload: dict) -> None:
    _write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _list_images(directory: str) -> dict[str, str]:
    out = {}
    for name in sorted(os.listdir(directory)):
        stem, suffix = os.path.splitext(name)
        if suffix.lower() in IMAGE_SUFFIXES:
            out[stem] = os.path.join(directory, name)
    return out


def _read_runtimes(pred_dir: str) -> dict[str, float]:
    path = os.path.join(pred_dir, "runtimes.csv")
    if not os.path.exists(path):
        return {}
    runtimes = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            case = row.get("case_id") or row.get("image_id")
            if case:
                runtimes[case] = float(row["runtime_seconds"])
    return runtimes


def _score_case(gt_path: str, pred_path: str | None, cfg: MatchConfig):
    """Return (row dict without runtime, error message or None, missing flag)."""
    error = None
    missing = pred_path is None
    gt = load_label_map(gt_path)
    if pred_path is None:
        pred = np.zeros_like(gt)
    else:
        try:
            pred = load_label_map(pred_path)
        except (OSError, ValueError) as exc:
            error = f"unreadable prediction: {exc}"
            pred = np.zeros_like(gt)
    if pred.shape != gt.shape:
        error = f"dimension mismatch: gt {gt.shape} vs pred {pred.shape}"
        pred = np.zeros_like(gt)
    result = match_instances(gt, pred, cfg)
    rec = precision_recall_f1(result.tp, result.fp, result.fn_)
    row = {
        "tp": result.tp,
        "fp": result.fp,
        "fn": result.fn_,
        "precision": repr(rec.precision),
        "recall": repr(rec.recall),
        "f1": repr(rec.f1),
        "pixel_count": gt.size,
    }
    return row, error, missing


@dataclass
class EvalManifest:
    """Everything an evaluation run needs: inputs, outputs, and config."""

    gt_dir: str
    pred_dirs: dict[str, str]
    output_dir: str
    match_config: MatchConfig = field(default_factory=MatchConfig)
    jobs: int = 1


def run_evaluation(manifest: EvalManifest) -> int:
    """Score every (team, image) pair; write per-team CSVs and summary JSON.

    Ground-truth images without a prediction are flagged missing and scored
    as empty predictions (f1 = 0); unreadable files and dimension mismatches
    are recorded per file and reflected in a nonzero exit code. Prediction
    files without a matching ground-truth image are flagged, not scored.
    """
    cfg = manifest.match_config
    gt_map = _list_images(manifest.gt_dir)
    if not gt_map:
        log.error("no ground-truth images in %s", manifest.gt_dir)
        return 2
    os.makedirs(manifest.output_dir, exist_ok=True)
    summary_teams = {}
    had_errors = False
    for team, pred_dir in manifest.pred_dirs.items():
        pred_map = _list_images(pred_dir)
        runtimes = _read_runtimes(pred_dir)
        cases = sorted(gt_map)

        def work(case):
            try:
                row, error, missing = _score_case(gt_map[case], pred_map.get(case), cfg)
            except (OSError, ValueError) as exc:
                row = {
                    "tp": 0,
                    "fp": 0,
                    "fn": 0,
                    "precision": repr(0.0),
                    "recall": repr(0.0),
                    "f1": repr(0.0),
                    "pixel_count": 0,
                }
                error, missing = f"unreadable ground truth: {exc}", False
            return case, row, error, missing

        if manifest.jobs > 1:
            with ThreadPoolExecutor(max_workers=manifest.jobs) as pool:
                results = list(pool.map(work, cases))
        else:
            results = [work(c) for c in cases]
        results.sort(key=lambda r: r[0])
        errors = {}
        missing_cases = []
        f1s = []
        buf = _stdio.StringIO()
        writer = csv.DictWriter(buf, fieldnames=METRICS_FIELDS)
        writer.writeheader()
        for case, row, error, missing in results:
            if error:
                errors[case] = error
                had_errors = True
            if missing:
                missing_cases.append(case)
            runtime = runtimes.get(case)
            out_row = {
                "image_id": case,
                "runtime_seconds": "" if runtime is None else repr(runtime),
                **row,
            }
            writer.writerow(out_row)
            f1s.append(float(row["f1"]))
        _write_text_atomic(os.path.join(manifest.output_dir, f"{team}_metrics.csv"), buf.getvalue())
        summary_teams[team] = {
            "images": len(cases),
            "mean_f1": float(np.mean(f1s)) if f1s else 0.0,
            "median_f1": float(np.median(f1s)) if f1s else 0.0,
            "missing": missing_cases,
            "unmatched_predictions": sorted(set(pred_map) - set(gt_map)),
            "errors": errors,
        }
    _dump_json(
        os.path.join(manifest.output_dir, "summary.json"),
        {
            "schema_version": SCHEMA_VERSION,
            "config": {
                "iou_threshold": cfg.iou_threshold,
                "strict_inequality": cfg.strict_inequality,
                "boundary_mode": cfg.remove_boundary,
                "composition": "remove_boundary -> relabel_connected -> match -> f1",
            },
            "gt_dir": manifest.gt_dir,
            "teams": summary_teams,
        },
    )
    return 1 if had_errors else 0


def _cmd_evaluate(args) -> int:
    manifest = EvalManifest(
        gt_dir=args.gt,
        pred_dirs=_parse_team_dirs(args),
        output_dir=args.out,
        match_config=MatchConfig(
            iou_threshold=args.iou_threshold,
            remove_boundary=_BOUNDARY_FLAG[args.boundary],
        ),
        jobs=args.jobs,
    )
    return run_evaluation(manifest)


def _parse_team_dirs(args) -> dict[str, str]:
    teams = {}
    for spec in args.pred:
        if "=" in spec:
            team, path = spec.split("=", 1)
        elif args.team:
            team, path = args.team, spec
        else:
            team, path = os.path.basename(os.path.normpath(spec)), spec
        teams[team] = path
    return teams


def _team_from_csv_path(path: str) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    return stem[: -len("_metrics")] if stem.endswith("_metrics") else stem


def _load_metrics_csvs(paths: list[str], runtime_mode: str | None) -> RankingTable:
    records = []
    for path in paths:
        team = _team_from_csv_path(path)
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                case = row.get("image_id") or row.get("case_id")
                if not case:
                    raise ValueError(f"{path}: rows need an image_id or case_id column")
                runtime = row.get("runtime_seconds") or ""
                pixels = row.get("pixel_count") or ""
                pixel_count = int(float(pixels)) if pixels else 0
                records.append(
                    RunRecord(
                        team_id=team,
                        case_id=case,
                        f1=float(row["f1"]),
                        runtime_seconds=float(runtime) if runtime else 0.0,
                        pixel_count=pixel_count if pixel_count >= 1 else 1_000_000,
                    )
                )
    table = RankingTable.from_records(records, runtime_mode=runtime_mode)
    present_per_case = (~table.missing_mask).sum(axis=0)
    if len(table.teams) < 2 or not np.any(present_per_case >= 2):
        raise ValueError("need at least 2 teams sharing at least 1 case id")
    return table


def _board_payload(board, runtime_mode: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "scheme": board.scheme,
        "runtime_mode": runtime_mode,
        "scores": board.scores,
        "ranks": board.ranks,
        "metadata": board.metadata,
    }


def _write_rank_matrix(path: str, table: RankingTable) -> None:
    ranks = per_case_ranks(table)
    buf = _stdio.StringIO()
    writer = csv.writer(buf)
    header = ["team"]
    for case in table.cases:
        header += [f"{case}|f1_rank", f"{case}|runtime_rank"]
    writer.writerow(header)
    for i, team in enumerate(table.teams):
        writer.writerow([team] + [repr(v) for v in ranks[i]])
    _write_text_atomic(path, buf.getvalue())


def _cmd_rank(args) -> int:
    runtime_mode = _RUNTIME_FLAG[args.runtime_mode]
    try:
        table = _load_metrics_csvs(args.metrics, runtime_mode)
    except ValueError as exc:
        log.error("%s", exc)
        return 2
    os.makedirs(args.out, exist_ok=True)
    schemes = list(SCHEMES) if args.all_schemes else [args.scheme]
    comparison = {}
    for scheme in schemes:
        board = build_leaderboard(table, scheme, args.alpha)
        payload = _board_payload(board, runtime_mode)
        payload["alpha"] = args.alpha
        _dump_json(os.path.join(args.out, f"leaderboard_{scheme}.json"), payload)
        comparison[scheme] = board.ranks
    if args.all_schemes:
        _dump_json(
            os.path.join(args.out, "scheme_comparison.json"),
            {
                "schema_version": SCHEMA_VERSION,
                "runtime_mode": runtime_mode,
                "alpha": args.alpha,
                "ranks_by_scheme": comparison,
            },
        )
    _write_rank_matrix(os.path.join(args.out, "rank_matrix.csv"), table)
    return 0


def _cmd_stability(args) -> int:
    runtime_mode = _RUNTIME_FLAG[args.runtime_mode]
    try:
        table = _load_metrics_csvs(args.metrics, runtime_mode)
    except ValueError as exc:
        log.error("%s", exc)
        return 2
    os.makedirs(args.out, exist_ok=True)
    cfg = BootstrapConfig(replicates=args.replicates, seed=args.seed)
    report = bootstrap_ranking_stability(table, cfg, args.scheme, args.alpha)
    _dump_json(
        os.path.join(args.out, "stability.json"),
        {
            "schema_version": SCHEMA_VERSION,
            "config": {
                "scheme": args.scheme,
                "replicates": args.replicates,
                "seed": args.seed,
                "alpha": args.alpha,
                "runtime_mode": runtime_mode,
            },
            "teams": report.teams,
            "rank_frequency": {
                t: {str(r): f for r, f in freqs.items()} for t, freqs in report.rank_frequency.items()
            },
            "median_rank": report.median_rank,
            "ci95": {t: list(v) for t, v in report.ci95.items()},
            "kendall_taus": report.kendall_taus,
            "metadata": report.metadata,
        },
    )
    sig = significance_matrix(table, args.alpha)
    buf = _stdio.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["team"] + sig.teams)
    for i, team in enumerate(sig.teams):
        row = [team]
        for j in range(len(sig.teams)):
            p = sig.p_values[i, j]
            row.append("" if not np.isfinite(p) else repr(float(p)))
        writer.writerow(row)
    _write_text_atomic(os.path.join(args.out, "significance.csv"), buf.getvalue())
    return 0


def _decode_one(args, path: str):
    if args.algorithm == "flow":
        field = cbio.read_flow_field(path)
        return decode_flow_field(
            field,
            prob_threshold=args.prob_threshold,
            n_iter=args.n_iter,
            min_size=0,  # CLI applies the small-cell filter uniformly below
        )
    if args.algorithm == "watershed":
        fg = load_label_map(path) > 0
        elevation = (
            cbio.read_dense_map(args.elevation)[0] if args.elevation else distance_elevation(fg)
        )
        markers = load_label_map(args.markers) if args.markers else distance_markers(fg, min_distance=3)
        return marker_watershed(elevation, markers, fg)
    if args.algorithm == "starpoly":
        polys, height, width = cbio.read_polygons(path)
        height = args.height or height
        width = args.width or width
        if not height or not width:
            raise ValueError("starpoly decoding needs --height/--width or dims in the JSON")
        kept = polygon_nms(polys, iou_threshold=args.nms_iou)
        return rasterize_star_polygons(kept, height, width)
    if args.algorithm == "contour":
        contours, height, width = cbio.read_contours(path)
        height = args.height or height
        width = args.width or width
        if not height or not width:
            raise ValueError("contour decoding needs --height/--width or dims in the JSON")
        return decode_fourier_contours(
            contours, args.samples, height, width, iou_threshold=args.nms_iou
        )
    raise ValueError(f"unknown algorithm: {args.algorithm}")


def _cmd_decode(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    failures = 0
    for path in args.input:
        try:
            labels = _decode_one(args, path)
        except (OSError, ValueError, KeyError) as exc:
            log.error("%s: %s", path, exc)
            failures += 1
            continue
        if not args.keep_small:
            labels = filter_small_cells(labels, 15) if labels.max() > 0 else labels
        stem = os.path.splitext(os.path.basename(path))[0]
        out_path = os.path.join(args.out, f"{stem}_label.png")
        tmp_path = out_path + ".tmp.png"
        save_label_map(labels, tmp_path)
        os.replace(tmp_path, out_path)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellbench",
        description="Benchmark engine for cell instance segmentation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="score predictions against ground truth")
    p_eval.add_argument("--gt", required=True, help="ground-truth label map directory")
    p_eval.add_argument(
        "--pred",
        action="append",
        required=True,
        help="prediction directory, as TEAM=DIR (repeatable) or DIR with --team",
    )
    p_eval.add_argument("--team", help="team name when --pred is a bare directory")
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.add_argument("--iou-threshold", type=float, default=0.5)
    p_eval.add_argument("--boundary", choices=sorted(_BOUNDARY_FLAG), default="both")
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_rank = sub.add_parser("rank", help="build leaderboards from metrics CSVs")
    p_rank.add_argument("--metrics", nargs="+", required=True, help="per-team metrics CSV files")
    p_rank.add_argument("--scheme", choices=SCHEMES, default="rank_then_mean")
    p_rank.add_argument("--all-schemes", action="store_true")
    p_rank.add_argument("--runtime-mode", choices=sorted(_RUNTIME_FLAG), default="subtract")
    p_rank.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p_rank.add_argument("--out", required=True)
    p_rank.set_defaults(func=_cmd_rank)

    p_stab = sub.add_parser("stability", help="bootstrap rank stability and significance")
    p_stab.add_argument("--metrics", nargs="+", required=True)
    p_stab.add_argument("--scheme", choices=SCHEMES, default="rank_then_mean")
    p_stab.add_argument("--runtime-mode", choices=sorted(_RUNTIME_FLAG), default="subtract")
    p_stab.add_argument("--replicates", type=int, default=1000)
    p_stab.add_argument("--seed", type=int, default=0)
    p_stab.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p_stab.add_argument("--out", required=True)
    p_stab.set_defaults(func=_cmd_stability)

    p_dec = sub.add_parser("decode", help="decode dense predictions to label maps")
    p_dec.add_argument("--algorithm", choices=("flow", "watershed", "starpoly", "contour"), required=True)
    p_dec.add_argument("--input", nargs="+", required=True)
    p_dec.add_argument("--out", required=True)
    p_dec.add_argument("--keep-small", action="store_true", help="skip the 15-px small-cell filter")
    p_dec.add_argument("--prob-threshold", type=float, default=0.5)
    p_dec.add_argument("--n-iter", type=int, default=200)
    p_dec.add_argument("--samples", type=int, default=128, help="contour samples per instance")
    p_dec.add_argument("--nms-iou", type=float, default=0.5)
    p_dec.add_argument("--height", type=int)
    p_dec.add_argument("--width", type=int)
    p_dec.add_argument("--elevation", help="elevation map for watershed (default: -distance)")
    p_dec.add_argument("--markers", help="marker label map for watershed (default: distance maxima)")
    p_dec.set_defaults(func=_cmd_decode)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("CELLBENCH_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
