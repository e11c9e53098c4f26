"""Command-line interface.

Exit codes: 0 success, 2 configuration/usage error, 3 stage failure.
Relative --run-dir paths resolve under $FAKESEG_RUN_ROOT when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..checkpoint import load_checkpoint
from ..injection import (
    dataset_stats,
    plan_one_segment,
    plan_two_segments,
    read_plans,
    read_videos,
    write_plans,
    write_stats,
)
from ..segmap import ScoreMap, SegmentationMap
from ..smoothing import SmoothConfig, smooth, smooth_scores
from ..synth import SynthConfig, synth_video
from ..training import predict_video
from ..windowing import read_features, write_features
from .config import ConfigError, load_experiment_config
from .experiment import (
    StageError,
    evaluate_maps,
    run_experiment,
    sweep_segment_lengths,
    sweep_window_grid,
)
from .report import write_report_files, write_rows


def _resolve_run_dir(raw: str) -> Path:
    path = Path(raw)
    if not path.is_absolute():
        root = os.environ.get("FAKESEG_RUN_ROOT")
        if root:
            path = Path(root) / path
    return path


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _cmd_plan(args) -> int:
    videos = read_videos(args.videos)
    planner = plan_one_segment if args.mode == "one" else plan_two_segments
    records = [(v, planner(v, args.seed)) for v in videos]
    write_plans(args.out, records)
    if args.stats:
        write_stats(args.stats, dataset_stats([p for _, p in records], videos))
    print(f"planned {len(records)} videos -> {args.out}")
    return 0


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        dim=args.dim,
        separation=args.separation,
        temporal_rho=args.temporal_rho,
        noise_std=args.noise_std,
        seed=args.seed,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = read_plans(args.plans)
    for video, plan in records:
        seq = synth_video(plan, video.length_frames, cfg)
        write_features(out_dir / f"{video.id}.feat", seq)
    print(f"synthesized {len(records)} videos -> {out_dir}")
    return 0


def _cmd_train(args) -> int:
    from ..training import train
    from ..transformer import SequenceClassifier
    from .experiment import load_split_features, windows_for_split

    cfg = load_experiment_config(args.config)
    w, overlap = cfg.model.window, cfg.eval.overlap
    train_set = windows_for_split(load_split_features(Path(args.train_dir)), w, overlap)
    val_set = windows_for_split(load_split_features(Path(args.val_dir)), w, overlap)
    model = SequenceClassifier.initialize(cfg.model, seed=cfg.train.seed)
    model, history = train(model, train_set, val_set, cfg.train)
    from ..checkpoint import save_checkpoint

    save_checkpoint(args.out, model)
    if args.history:
        Path(args.history).write_text(
            json.dumps(history.to_dict(), sort_keys=True) + "\n", encoding="utf-8"
        )
    best = history.epochs[history.best_epoch - 1]
    print(
        f"trained {len(history.epochs)} epochs; best epoch {history.best_epoch} "
        f"(val loss {best.val_loss:.4f}, val acc {best.val_accuracy:.4f}) -> {args.out}"
    )
    return 0


def _cmd_predict(args) -> int:
    model = load_checkpoint(args.model)
    feats = Path(args.features)
    paths = sorted(feats.glob("*.feat")) if feats.is_dir() else [feats]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in paths:
        seq = read_features(path)
        scores = predict_video(model, seq, args.overlap, mode=args.frame_mode)
        (out_dir / f"{seq.video_id}.scores.json").write_text(scores.to_json() + "\n", encoding="utf-8")
    print(f"scored {len(paths)} videos -> {out_dir}")
    return 0


def _cmd_smooth(args) -> int:
    cfg = SmoothConfig(k=args.k)
    text = Path(args.input).read_text(encoding="utf-8")
    if args.threshold is not None:
        result = smooth_scores(ScoreMap.from_json(text), args.threshold, cfg)
    else:
        result = smooth(SegmentationMap.from_text(text), cfg)
    Path(args.output).write_text(result.to_text(), encoding="ascii")
    return 0


def _cmd_eval(args) -> int:
    gt_dir = Path(args.gt_dir)
    # a run's maps/ directory mixes gt/pred/smooth maps; prefer the gt ones
    paths = sorted(gt_dir.glob("*.gt.map")) or sorted(gt_dir.glob("*.map"))
    gt_maps = {}
    for path in paths:
        vid = path.name.removesuffix(".gt.map").removesuffix(".map")
        gt_maps[vid] = SegmentationMap.from_text(path.read_text(encoding="ascii"))
    score_maps = {}
    for path in sorted(Path(args.scores_dir).glob("*.scores.json")):
        vid = path.name.removesuffix(".scores.json")
        score_maps[vid] = ScoreMap.from_json(path.read_text(encoding="utf-8"))
    report = evaluate_maps(gt_maps, score_maps, args.threshold, args.k)
    write_report_files(report, args.out)
    print(f"evaluated {len(report.per_video)} videos -> {args.out}.json/.txt/.csv")
    return 0


def _cmd_sweep_lengths(args) -> int:
    cfg = load_experiment_config(args.config)
    model = load_checkpoint(args.model)
    rows = sweep_segment_lengths(
        model,
        args.lengths,
        cfg,
        num_videos=args.num_videos,
        video_length=args.video_length,
    )
    write_rows(rows, args.out)
    print(f"swept {len(rows)} segment lengths -> {args.out}.json/.csv")
    return 0


def _cmd_sweep_window(args) -> int:
    cfg = load_experiment_config(args.config)
    run_dir = _resolve_run_dir(args.run_dir)
    rows = sweep_window_grid(cfg, run_dir, args.windows, args.overlaps)
    write_rows(rows, args.out)
    print(f"swept {len(rows)} window/overlap cells -> {args.out}.json/.csv")
    return 0


def _cmd_report(args) -> int:
    data = json.loads(Path(args.report).read_text(encoding="utf-8"))
    from .experiment import EvalReport, VideoEval

    report = EvalReport(
        per_video=tuple(VideoEval(**row) for row in data["per_video"]),
        aggregate=data["aggregate"],
        video_level=data["video_level"],
        baseline=data["baseline"],
        threshold=data["threshold"],
        smooth_k=data["smooth_k"],
        length_sweep=tuple(data["length_sweep"]) if "length_sweep" in data else None,
        window_grid=tuple(data["window_grid"]) if "window_grid" in data else None,
    )
    write_report_files(report, args.out)
    print(f"rendered report -> {args.out}.json/.txt/.csv")
    return 0


def _cmd_run(args) -> int:
    cfg = load_experiment_config(args.config)
    run_dir = _resolve_run_dir(args.run_dir)
    report = run_experiment(cfg, run_dir)
    agg = report.aggregate
    print(
        f"run complete: {len(report.per_video)} test videos, "
        f"IoU {agg['iou_raw']:.4f} -> {agg['iou_smoothed']:.4f} after smoothing, "
        f"AUC {agg['auc']:.4f}"
    )
    print(f"artifacts in {run_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fakeseg",
        description="Temporal fake-segment detection toolkit: plan, synthesize, train, score.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan fake-segment injections for a video list")
    p.add_argument("--mode", choices=("one", "two"), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--videos", required=True, help="JSONL of {id, length}")
    p.add_argument("--out", required=True, help="output plan JSONL")
    p.add_argument("--stats", help="optional dataset stats JSON to write")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("synth", help="synthesize per-frame features from a plan file")
    p.add_argument("--plans", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--separation", type=float, default=6.0)
    p.add_argument("--temporal-rho", type=float, default=0.0)
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train a model on feature directories")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--train-dir", required=True)
    p.add_argument("--val-dir", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--history", help="optional history JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score videos with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True, help="a .feat file or a directory of them")
    p.add_argument("--overlap", type=int, default=4)
    p.add_argument("--frame-mode", choices=("mean", "max", "center"), default="mean")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("smooth", help="majority-vote smooth a map or scores file")
    p.add_argument("--k", type=int, default=7)
    p.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="when given, the input is a scores JSON to threshold first",
    )
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_smooth)

    p = sub.add_parser("eval", help="score predicted frame scores against ground-truth maps")
    p.add_argument("--gt-dir", required=True, help="directory of *.map text files")
    p.add_argument("--scores-dir", required=True, help="directory of *.scores.json files")
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True, help="report path prefix")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep-lengths", help="IoU/AUC across injected segment lengths")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--lengths", type=_int_list, required=True, help="comma-separated frame counts")
    p.add_argument("--num-videos", type=int, default=20)
    p.add_argument("--video-length", type=int, default=600)
    p.add_argument("--out", required=True, help="table path prefix")
    p.set_defaults(func=_cmd_sweep_lengths)

    p = sub.add_parser("sweep-window", help="train and score a window/overlap grid")
    p.add_argument("--config", required=True)
    p.add_argument("--run-dir", required=True)
    p.add_argument("--windows", type=_int_list, required=True)
    p.add_argument("--overlaps", type=_int_list, required=True)
    p.add_argument("--out", required=True, help="table path prefix")
    p.set_defaults(func=_cmd_sweep_window)

    p = sub.add_parser("report", help="re-render text/CSV tables from a report JSON")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("run", help="run the full experiment pipeline from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--run-dir", required=True)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
