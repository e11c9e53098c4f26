"""End-to-end experiment pipeline: plan, synthesize, train, predict, score.

Every stage persists its artifacts under the run directory, so a finished
run is self-describing and a rerun with the same config and seeds rewrites
every file byte-identically:

    run_dir/
      config.json            resolved experiment configuration
      plans/{train,val,test}.jsonl
      features/{train,val,test}/<id>.feat (+ .labels)
      model.tfkm             best-validation checkpoint
      history.json           per-epoch training curves
      scores/<id>.scores.json
      maps/<id>.{gt,pred,smooth}.map
      report.{json,txt,csv}

A failing stage aborts with the stage name; artifacts written so far stay
in place for inspection.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from ..checkpoint import save_checkpoint
from ..injection import (
    SegmentPlan,
    VideoSpec,
    plan_fixed_segment,
    plan_one_segment,
    plan_two_segments,
    render_map,
    write_plans,
)
from ..metrics import BaselineParams, expected_iou_baseline, frame_accuracy, frame_auc, iou, video_score
from ..prng import stream_for
from ..segmap import ScoreMap, SegmentationMap
from ..smoothing import SmoothConfig, smooth_scores
from ..synth import SynthConfig, synth_video
from ..training import predict_video, train
from ..transformer import SequenceClassifier
from ..windowing import FeatureSequence, make_windows, read_features, write_features
from .config import ExperimentConfig

SPLITS = ("train", "val", "test")
ASSUMED_FPS = 25.0  # frame<->seconds conversion used in sweep reports


class StageError(RuntimeError):
    """A pipeline stage failed (CLI exit code 3)."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass(frozen=True)
class VideoEval:
    """Metrics for one test video, before and after smoothing."""

    video_id: str
    fake_ratio: float
    iou_raw: float
    iou_smoothed: float
    accuracy_raw: float
    accuracy_smoothed: float
    auc: float | None
    video_score: float
    video_is_fake: bool


@dataclass(frozen=True)
class EvalReport:
    """Per-video and aggregate frame metrics plus the video-level panel.

    The optional sweep tables are attached when the corresponding sweep has
    been run (see `sweep_segment_lengths` / `sweep_window_grid`).
    """

    per_video: tuple[VideoEval, ...]
    aggregate: dict[str, float | None]
    video_level: dict[str, float | None]
    baseline: dict[str, float]
    threshold: float
    smooth_k: int
    length_sweep: tuple[dict[str, Any], ...] | None = None
    window_grid: tuple[dict[str, Any], ...] | None = None

    def to_dict(self) -> dict[str, Any]:
        out = {
            "per_video": [dataclasses.asdict(v) for v in self.per_video],
            "aggregate": self.aggregate,
            "video_level": self.video_level,
            "baseline": self.baseline,
            "threshold": self.threshold,
            "smooth_k": self.smooth_k,
            "num_videos": len(self.per_video),
        }
        if self.length_sweep is not None:
            out["length_sweep"] = list(self.length_sweep)
        if self.window_grid is not None:
            out["window_grid"] = list(self.window_grid)
        return out

    def with_sweeps(
        self,
        length_sweep: list[dict[str, Any]] | None = None,
        window_grid: list[dict[str, Any]] | None = None,
    ) -> "EvalReport":
        return dataclasses.replace(
            self,
            length_sweep=tuple(length_sweep) if length_sweep is not None else self.length_sweep,
            window_grid=tuple(window_grid) if window_grid is not None else self.window_grid,
        )


def evaluate_maps(
    gt_maps: dict[str, SegmentationMap],
    score_maps: dict[str, ScoreMap],
    threshold: float,
    smooth_k: int,
) -> EvalReport:
    """Score predicted frame scores against ground-truth maps.

    Per-video AUC is None for single-class videos; the aggregate AUC
    averages the defined values. The analytic random-guess IoU for the
    observed Real ratio at p = 0.5 is reported as the baseline.
    """
    if set(gt_maps) != set(score_maps):
        raise ValueError("ground-truth and score maps must cover the same video ids")
    if not gt_maps:
        raise ValueError("no videos to evaluate")
    cfg = SmoothConfig(k=smooth_k)
    rows = []
    for vid in sorted(gt_maps):
        gt, scores = gt_maps[vid], score_maps[vid]
        pred_raw = scores.threshold(threshold)
        pred_smooth = smooth_scores(scores, threshold, cfg)
        try:
            auc = frame_auc(gt, scores)
        except ValueError:
            auc = None
        rows.append(
            VideoEval(
                video_id=vid,
                fake_ratio=gt.fake_ratio,
                iou_raw=iou(gt, pred_raw),
                iou_smoothed=iou(gt, pred_smooth),
                accuracy_raw=frame_accuracy(gt, pred_raw),
                accuracy_smoothed=frame_accuracy(gt, pred_smooth),
                auc=auc,
                video_score=video_score(scores),
                video_is_fake=gt.fake_ratio > 0,
            )
        )

    def mean(values):
        vals = [v for v in values if v is not None]
        return float(np.mean(vals)) if vals else None

    aggregate = {
        "iou_raw": mean(r.iou_raw for r in rows),
        "iou_smoothed": mean(r.iou_smoothed for r in rows),
        "accuracy_raw": mean(r.accuracy_raw for r in rows),
        "accuracy_smoothed": mean(r.accuracy_smoothed for r in rows),
        "auc": mean(r.auc for r in rows),
    }

    video_gt = np.array([r.video_is_fake for r in rows])
    vid_scores = np.array([r.video_score for r in rows])
    video_level: dict[str, float | None] = {
        "accuracy": float(((vid_scores >= threshold) == video_gt).mean()),
        "auc": None,
    }
    if 0 < video_gt.sum() < len(video_gt):
        video_level["auc"] = frame_auc(SegmentationMap(video_gt), ScoreMap(vid_scores))

    mean_fake = float(np.mean([r.fake_ratio for r in rows]))
    baseline = {
        "mean_fake_ratio": mean_fake,
        "expected_random_iou": expected_iou_baseline(BaselineParams(f=1.0 - mean_fake, p=0.5)),
    }
    return EvalReport(
        per_video=tuple(rows),
        aggregate=aggregate,
        video_level=video_level,
        baseline=baseline,
        threshold=threshold,
        smooth_k=smooth_k,
    )


# -- dataset staging --


def _make_videos(cfg: ExperimentConfig) -> dict[str, list[tuple[VideoSpec, SegmentPlan]]]:
    ds = cfg.dataset
    planner = plan_one_segment if ds.mode == "one" else plan_two_segments
    out: dict[str, list[tuple[VideoSpec, SegmentPlan]]] = {}
    counts = {"train": ds.num_train_videos, "val": ds.num_val_videos, "test": ds.num_test_videos}
    for split, count in counts.items():
        records = []
        for i in range(count):
            vid = f"{split}{i:04d}"
            length = stream_for(ds.seed, "length/" + vid).randrange(ds.min_length, ds.max_length + 1)
            video = VideoSpec(id=vid, length_frames=length)
            records.append((video, planner(video, ds.seed)))
        out[split] = records
    for i in range(ds.num_real_test_videos):
        vid = f"testreal{i:04d}"
        length = stream_for(ds.seed, "length/" + vid).randrange(ds.min_length, ds.max_length + 1)
        out["test"].append((VideoSpec(id=vid, length_frames=length), SegmentPlan(vid, ())))
    return out


def _synth_config(cfg: ExperimentConfig) -> SynthConfig:
    ds = cfg.dataset
    return SynthConfig(
        dim=ds.feature_dim,
        separation=ds.separation,
        temporal_rho=ds.temporal_rho,
        noise_std=ds.noise_std,
        seed=ds.seed,
    )


def load_split_features(split_dir: Path) -> list[FeatureSequence]:
    paths = sorted(split_dir.glob("*.feat"))
    if not paths:
        raise FileNotFoundError(f"no .feat files in {split_dir}")
    return [read_features(p) for p in paths]


def windows_for_split(seqs: Iterable[FeatureSequence], window: int, overlap: int):
    xs, ys = [], []
    for seq in seqs:
        if seq.labels is None:
            raise ValueError(f"video {seq.video_id!r} has no labels; cannot build a training set")
        batch = make_windows(seq, window, overlap)
        xs.append(batch.windows)
        ys.append(batch.window_labels)
    return np.concatenate(xs), np.concatenate(ys)


def run_experiment(cfg: ExperimentConfig, run_dir: str | Path) -> EvalReport:
    """Execute the full pipeline under `run_dir` and return the report."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(
        json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

    stage = "plan"
    try:
        if cfg.dataset.features_dir is None:
            split_records = _make_videos(cfg)
            plans_dir = run_dir / "plans"
            plans_dir.mkdir(exist_ok=True)
            for split in SPLITS:
                write_plans(plans_dir / f"{split}.jsonl", split_records[split])

            stage = "synth"
            synth_cfg = _synth_config(cfg)
            features_root = run_dir / "features"
            for split in SPLITS:
                split_dir = features_root / split
                split_dir.mkdir(parents=True, exist_ok=True)
                for video, plan in split_records[split]:
                    seq = synth_video(plan, video.length_frames, synth_cfg)
                    write_features(split_dir / f"{video.id}.feat", seq)
        else:
            features_root = Path(cfg.dataset.features_dir)

        stage = "train"
        split_seqs = {s: load_split_features(features_root / s) for s in SPLITS}
        w, overlap = cfg.model.window, cfg.eval.overlap
        train_set = windows_for_split(split_seqs["train"], w, overlap)
        val_set = windows_for_split(split_seqs["val"], w, overlap)
        model = SequenceClassifier.initialize(cfg.model, seed=cfg.train.seed)
        model, history = train(model, train_set, val_set, cfg.train)
        save_checkpoint(run_dir / "model.tfkm", model)
        (run_dir / "history.json").write_text(
            json.dumps(history.to_dict(), sort_keys=True) + "\n", encoding="utf-8"
        )

        stage = "predict"
        scores_dir = run_dir / "scores"
        maps_dir = run_dir / "maps"
        scores_dir.mkdir(exist_ok=True)
        maps_dir.mkdir(exist_ok=True)
        gt_maps: dict[str, SegmentationMap] = {}
        score_maps: dict[str, ScoreMap] = {}
        smoother = SmoothConfig(k=cfg.eval.smooth_k)
        for seq in split_seqs["test"]:
            if seq.labels is None:
                raise ValueError(f"test video {seq.video_id!r} has no ground-truth labels")
            scores = predict_video(model, seq, overlap, mode=cfg.eval.frame_mode)
            gt_maps[seq.video_id] = seq.labels
            score_maps[seq.video_id] = scores
            (scores_dir / f"{seq.video_id}.scores.json").write_text(
                scores.to_json() + "\n", encoding="utf-8"
            )
            (maps_dir / f"{seq.video_id}.gt.map").write_text(seq.labels.to_text(), encoding="ascii")
            (maps_dir / f"{seq.video_id}.pred.map").write_text(
                scores.threshold(cfg.eval.threshold).to_text(), encoding="ascii"
            )
            (maps_dir / f"{seq.video_id}.smooth.map").write_text(
                smooth_scores(scores, cfg.eval.threshold, smoother).to_text(), encoding="ascii"
            )

        stage = "eval"
        report = evaluate_maps(gt_maps, score_maps, cfg.eval.threshold, cfg.eval.smooth_k)
        from .report import write_report_files

        write_report_files(report, run_dir / "report")
        return report
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc


# -- sweeps --


def sweep_segment_lengths(
    model: SequenceClassifier,
    lengths: Iterable[int],
    cfg: ExperimentConfig,
    num_videos: int = 20,
    video_length: int = 600,
) -> list[dict[str, Any]]:
    """Mean IoU/AUC per injected segment length, without smoothing.

    For each length, `num_videos` fresh synthetic test videos receive one
    segment of exactly that length at a uniformly random feasible start.
    Lengths are in frames; the reported seconds assume 25 fps.
    """
    synth_cfg = _synth_config(cfg)
    rows = []
    for length in lengths:
        if length < 1:
            raise ValueError("segment lengths must be positive")
        if length > video_length:
            raise ValueError(f"segment length {length} exceeds video length {video_length}")
        ious, aucs = [], []
        for i in range(num_videos):
            video = VideoSpec(id=f"len{length:05d}_{i:04d}", length_frames=video_length)
            plan = plan_fixed_segment(video, length, cfg.dataset.seed)
            seq = synth_video(plan, video.length_frames, synth_cfg)
            scores = predict_video(model, seq, cfg.eval.overlap, mode=cfg.eval.frame_mode)
            gt = render_map(plan, video.length_frames)
            ious.append(iou(gt, scores.threshold(cfg.eval.threshold)))
            aucs.append(frame_auc(gt, scores))
        rows.append(
            {
                "length_frames": int(length),
                "length_seconds": length / ASSUMED_FPS,
                "mean_iou": float(np.mean(ious)),
                "mean_auc": float(np.mean(aucs)),
            }
        )
    return rows


def sweep_window_grid(
    cfg: ExperimentConfig,
    run_dir: str | Path,
    window_sizes: Iterable[int],
    overlaps: Iterable[int],
) -> list[dict[str, Any]]:
    """Train one desk-scale model per (window, overlap) cell and score it.

    Cells with overlap >= window are emitted with status "skipped". Valid
    cells report frame-level IoU (unsmoothed) and AUC on the test split;
    the default geometry (window 5, overlap 4) is flagged.
    """
    run_dir = Path(run_dir)
    features_root = (
        Path(cfg.dataset.features_dir) if cfg.dataset.features_dir else run_dir / "features"
    )
    if not (features_root / "train").exists():
        run_experiment(cfg, run_dir)  # materialize features once
    split_seqs = {s: load_split_features(features_root / s) for s in SPLITS}

    rows = []
    for w in window_sizes:
        for o in overlaps:
            cell: dict[str, Any] = {
                "window": int(w),
                "overlap": int(o),
                "default": (w, o) == (5, 4),
            }
            if o >= w:
                cell["status"] = "skipped"
                rows.append(cell)
                continue
            min_frames = min(seq.num_frames for seqs in split_seqs.values() for seq in seqs)
            if w > min_frames:
                cell["status"] = "skipped"
                rows.append(cell)
                continue
            model_cfg = dataclasses.replace(cfg.model, window=int(w))
            train_set = windows_for_split(split_seqs["train"], w, o)
            val_set = windows_for_split(split_seqs["val"], w, o)
            model = SequenceClassifier.initialize(model_cfg, seed=cfg.train.seed)
            model, _ = train(model, train_set, val_set, cfg.train)
            ious, aucs = [], []
            for seq in split_seqs["test"]:
                scores = predict_video(model, seq, o, mode=cfg.eval.frame_mode)
                ious.append(iou(seq.labels, scores.threshold(cfg.eval.threshold)))
                try:
                    aucs.append(frame_auc(seq.labels, scores))
                except ValueError:
                    pass
            cell["status"] = "ok"
            cell["mean_iou"] = float(np.mean(ious))
            cell["mean_auc"] = float(np.mean(aucs)) if aucs else None
            rows.append(cell)
    return rows
