"""Report rendering: machine JSON, aligned text tables, CSV for plots."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

from .experiment import EvalReport


def _fmt(value: float | None, width: int = 8) -> str:
    return f"{value:{width}.4f}" if value is not None else " " * (width - 3) + "n/a"


def render_text(report: EvalReport) -> str:
    lines = []
    id_width = max(len("video"), max(len(r.video_id) for r in report.per_video))
    header = (
        f"{'video':<{id_width}}  {'fake%':>6}  {'IoU':>8}  {'IoU+sm':>8}  "
        f"{'acc':>8}  {'acc+sm':>8}  {'AUC':>8}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for r in report.per_video:
        lines.append(
            f"{r.video_id:<{id_width}}  {100 * r.fake_ratio:>6.1f}  {_fmt(r.iou_raw)}  "
            f"{_fmt(r.iou_smoothed)}  {_fmt(r.accuracy_raw)}  {_fmt(r.accuracy_smoothed)}  "
            f"{_fmt(r.auc)}"
        )
    lines.append("-" * len(header))
    agg = report.aggregate
    lines.append(
        f"{'mean':<{id_width}}  {100 * report.baseline['mean_fake_ratio']:>6.1f}  "
        f"{_fmt(agg['iou_raw'])}  {_fmt(agg['iou_smoothed'])}  {_fmt(agg['accuracy_raw'])}  "
        f"{_fmt(agg['accuracy_smoothed'])}  {_fmt(agg['auc'])}"
    )
    lines.append("")
    lines.append(f"random-guess IoU baseline (p=0.5): {report.baseline['expected_random_iou']:.4f}")
    lines.append(
        f"video-level: accuracy {_fmt(report.video_level['accuracy'], 6).strip()}"
        f", AUC {_fmt(report.video_level['auc'], 6).strip()}"
    )
    lines.append(f"threshold {report.threshold}, smoothing offset k={report.smooth_k}")
    if report.length_sweep is not None:
        lines.append("")
        lines.append("segment-length sweep (no smoothing):")
        lines.append(f"{'frames':>8}  {'seconds':>8}  {'IoU':>8}  {'AUC':>8}")
        for row in report.length_sweep:
            lines.append(
                f"{row['length_frames']:>8}  {row['length_seconds']:>8.2f}  "
                f"{_fmt(row['mean_iou'])}  {_fmt(row['mean_auc'])}"
            )
    if report.window_grid is not None:
        lines.append("")
        lines.append("window/overlap grid:")
        lines.append(f"{'window':>8}  {'overlap':>8}  {'IoU':>8}  {'AUC':>8}  note")
        for row in report.window_grid:
            if row.get("status") != "ok":
                lines.append(f"{row['window']:>8}  {row['overlap']:>8}  {'-':>8}  {'-':>8}  skipped")
                continue
            note = "default" if row.get("default") else ""
            lines.append(
                f"{row['window']:>8}  {row['overlap']:>8}  {_fmt(row['mean_iou'])}  "
                f"{_fmt(row['mean_auc'])}  {note}"
            )
    return "\n".join(lines) + "\n"


_CSV_COLUMNS = (
    "video_id",
    "fake_ratio",
    "iou_raw",
    "iou_smoothed",
    "accuracy_raw",
    "accuracy_smoothed",
    "auc",
    "video_score",
    "video_is_fake",
)


def write_report_files(report: EvalReport, prefix: str | Path) -> None:
    """Write <prefix>.json, <prefix>.txt and <prefix>.csv."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_suffix(".json").write_text(
        json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    prefix.with_suffix(".txt").write_text(render_text(report), encoding="utf-8")
    with open(prefix.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for r in report.per_video:
            writer.writerow([getattr(r, c) for c in _CSV_COLUMNS])


def write_rows(rows: list[dict[str, Any]], prefix: str | Path) -> None:
    """Write a sweep result table as <prefix>.json and <prefix>.csv."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_suffix(".json").write_text(
        json.dumps(rows, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(prefix.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c, "") for c in columns])
