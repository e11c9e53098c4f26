"""Fake-segment injection planning and benchmark dataset statistics.

Planning rules mirror the benchmark construction this toolkit reproduces:

  * one segment: start uniform in the first half of the video, length a
    uniform choice from {125, 150, 175} frames; if the drawn segment would
    run past the end, the start is redrawn (not clamped) so placement stays
    uniform on the feasible set.
  * two segments: the first starts uniformly within the first 125 frames,
    the second uniformly within the first 75 frames of the second half;
    both lengths come from the same {125, 150, 175} menu. Overlapping draws
    are redrawn jointly.

Plans are deterministic functions of (seed, video id) via a portable
SplitMix64 stream, so a plan file can be regenerated bit-exactly anywhere.

File formats:
  * plan file: JSON lines, one object per video:
    ``{"id": ..., "length": ..., "segments": [[start, len], ...]}``
  * video list: JSON lines ``{"id": ..., "length": ...}``
  * stats file: JSON object with the three DatasetStats fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .prng import stream_for
from .segmap import SegmentationMap

SEGMENT_LENGTH_MENU = (125, 150, 175)
ONE_SEGMENT_MIN_FRAMES = 250
TWO_SEGMENT_MIN_FRAMES = 500
FIRST_START_WINDOW = 125   # two-segment mode: segment 1 starts in [0, 125)
SECOND_START_WINDOW = 75   # two-segment mode: segment 2 starts in [T//2, T//2 + 75)


@dataclass(frozen=True)
class VideoSpec:
    """One video to plan against: an id and its frame count."""

    id: str
    length_frames: int

    def __post_init__(self):
        if not self.id:
            raise ValueError("video id must be non-empty")
        if self.length_frames < 1:
            raise ValueError("length_frames must be positive")


@dataclass(frozen=True)
class SegmentPlan:
    """Fake intervals injected into one video, as (start, length) pairs."""

    video_id: str
    segments: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev_end = 0
        for start, length in self.segments:
            if start < 0 or length < 1:
                raise ValueError(f"invalid segment ({start}, {length})")
            if start < prev_end:
                raise ValueError("segments must be sorted and non-overlapping")
            prev_end = start + length

    @property
    def fake_frames(self) -> int:
        return sum(length for _, length in self.segments)


@dataclass(frozen=True)
class DatasetStats:
    """Aggregate benchmark statistics; a ratio is None when its mode is absent."""

    fake_ratio_one_seg: float | None
    fake_ratio_two_seg: float | None
    avg_length: float


def plan_one_segment(video: VideoSpec, rng_seed: int) -> SegmentPlan:
    """Plan exactly one fake segment for `video`, deterministically."""
    t = video.length_frames
    if t < ONE_SEGMENT_MIN_FRAMES:
        raise ValueError(
            f"video {video.id!r} has {t} frames; one-segment plans need at least "
            f"{ONE_SEGMENT_MIN_FRAMES}"
        )
    rng = stream_for(rng_seed, video.id)
    start = rng.below(t // 2)
    length = rng.choice(SEGMENT_LENGTH_MENU)
    while start + length > t:
        start = rng.below(t // 2)
    return SegmentPlan(video.id, ((start, length),))


def plan_two_segments(video: VideoSpec, rng_seed: int) -> SegmentPlan:
    """Plan two non-overlapping fake segments for `video`, deterministically."""
    t = video.length_frames
    if t < TWO_SEGMENT_MIN_FRAMES:
        raise ValueError(
            f"video {video.id!r} has {t} frames; two-segment plans need at least "
            f"{TWO_SEGMENT_MIN_FRAMES}"
        )
    rng = stream_for(rng_seed, video.id)
    half = t // 2
    while True:
        s1 = rng.below(FIRST_START_WINDOW)
        l1 = rng.choice(SEGMENT_LENGTH_MENU)
        s2 = half + rng.below(SECOND_START_WINDOW)
        l2 = rng.choice(SEGMENT_LENGTH_MENU)
        if s1 + l1 <= s2 and s2 + l2 <= t:
            return SegmentPlan(video.id, ((s1, l1), (s2, l2)))


def plan_fixed_segment(video: VideoSpec, length: int, rng_seed: int) -> SegmentPlan:
    """Plan one segment of an exact length, placed uniformly at random.

    Used by the varying-segment-length sweep, where lengths come from the
    caller rather than from the standard menu.
    """
    t = video.length_frames
    if length < 1:
        raise ValueError("segment length must be positive")
    if length > t:
        raise ValueError(f"segment of {length} frames does not fit in {t}-frame video {video.id!r}")
    rng = stream_for(rng_seed, video.id)
    start = rng.below(t - length + 1)
    return SegmentPlan(video.id, ((start, length),))


def render_map(plan: SegmentPlan, length: int) -> SegmentationMap:
    """Render a plan to a per-frame map: Fake inside segments, Real elsewhere."""
    labels = np.zeros(length, dtype=np.uint8)
    for start, seg_len in plan.segments:
        if start + seg_len > length:
            raise ValueError(
                f"segment ({start}, {seg_len}) exceeds video length {length} in plan "
                f"for {plan.video_id!r}"
            )
        labels[start : start + seg_len] = 1
    return SegmentationMap(labels)


def dataset_stats(plans: Iterable[SegmentPlan], videos: Sequence[VideoSpec]) -> DatasetStats:
    """Mean fake-frame ratio per mode and mean video length.

    Every plan must reference a video in `videos`; plans are bucketed by
    their segment count (1 or 2).
    """
    lengths = {v.id: v.length_frames for v in videos}
    if not lengths:
        raise ValueError("no videos given")
    ratios: dict[int, list[float]] = {1: [], 2: []}
    for plan in plans:
        if plan.video_id not in lengths:
            raise ValueError(f"plan references unknown video id {plan.video_id!r}")
        n_seg = len(plan.segments)
        if n_seg not in ratios:
            raise ValueError(f"plan for {plan.video_id!r} has {n_seg} segments; expected 1 or 2")
        ratios[n_seg].append(plan.fake_frames / lengths[plan.video_id])
    mean = lambda xs: float(np.mean(xs)) if xs else None
    return DatasetStats(
        fake_ratio_one_seg=mean(ratios[1]),
        fake_ratio_two_seg=mean(ratios[2]),
        avg_length=float(np.mean(list(lengths.values()))),
    )


# -- file formats --


def write_videos(path: str | Path, videos: Iterable[VideoSpec]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in videos:
            fh.write(json.dumps({"id": v.id, "length": v.length_frames}) + "\n")


def read_videos(path: str | Path) -> list[VideoSpec]:
    videos = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            videos.append(VideoSpec(id=obj["id"], length_frames=int(obj["length"])))
    return videos


def write_plans(path: str | Path, records: Iterable[tuple[VideoSpec, SegmentPlan]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for video, plan in records:
            if plan.video_id != video.id:
                raise ValueError(f"plan id {plan.video_id!r} does not match video {video.id!r}")
            obj = {
                "id": video.id,
                "length": video.length_frames,
                "segments": [[s, l] for s, l in plan.segments],
            }
            fh.write(json.dumps(obj) + "\n")


def read_plans(path: str | Path) -> list[tuple[VideoSpec, SegmentPlan]]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            video = VideoSpec(id=obj["id"], length_frames=int(obj["length"]))
            plan = SegmentPlan(video.id, tuple((int(s), int(l)) for s, l in obj["segments"]))
            records.append((video, plan))
    return records


def write_stats(path: str | Path, stats: DatasetStats) -> None:
    obj = {
        "fake_ratio_one_seg": stats.fake_ratio_one_seg,
        "fake_ratio_two_seg": stats.fake_ratio_two_seg,
        "avg_length": stats.avg_length,
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True) + "\n", encoding="utf-8")


def read_stats(path: str | Path) -> DatasetStats:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    unknown = set(obj) - {"fake_ratio_one_seg", "fake_ratio_two_seg", "avg_length"}
    if unknown:
        raise ValueError(f"unknown stats fields: {sorted(unknown)}")
    return DatasetStats(
        fake_ratio_one_seg=obj["fake_ratio_one_seg"],
        fake_ratio_two_seg=obj["fake_ratio_two_seg"],
        avg_length=float(obj["avg_length"]),
    )
