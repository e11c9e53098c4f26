"""Sliding-window assembly of per-frame features and frame-score projection.

Per-frame feature vectors are accumulated sequentially for one video and cut
into overlapping windows of W frames (stride = W - overlap). Windows never
cross video boundaries. Each window carries the label of its center frame
for training; window-level scores are projected back to frames by averaging
over every window that covers the frame.

Feature file format (little-endian binary):
    magic "TFKF", u32 version=1, u32 T, u32 d, then T*d float32 row-major.
An optional sibling file (same path with a ".labels" suffix) stores the
ground-truth map in the text segmap format.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .segmap import ScoreMap, SegmentationMap

FEATURE_MAGIC = b"TFKF"
FEATURE_VERSION = 1


@dataclass(frozen=True)
class FeatureSequence:
    """T x d per-frame features for one video, with optional labels."""

    video_id: str
    features: np.ndarray
    labels: SegmentationMap | None = None

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise ValueError("features must be a T x d matrix with T, d >= 1")
        if self.labels is not None and len(self.labels) != self.features.shape[0]:
            raise ValueError(
                f"label length {len(self.labels)} does not match {self.features.shape[0]} frames"
            )

    @property
    def num_frames(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])


@dataclass(frozen=True)
class WindowBatch:
    """Stacked windows of one video: N x W x d features plus window starts."""

    windows: np.ndarray
    window_starts: np.ndarray
    window_labels: np.ndarray | None = None  # center-frame label per window

    @property
    def num_windows(self) -> int:
        return int(self.windows.shape[0])

    @property
    def window_size(self) -> int:
        return int(self.windows.shape[1])


def window_starts(num_frames: int, window: int, overlap: int) -> np.ndarray:
    """Start indices for sliding windows over `num_frames` frames.

    Starts advance by stride = window - overlap; if the regular grid leaves
    trailing frames uncovered, one extra window right-aligned at T - W is
    appended so the union of windows is always [0, T).
    """
    if window < 1:
        raise ValueError("window size must be >= 1")
    if window > num_frames:
        raise ValueError(f"window size {window} exceeds video length {num_frames}")
    if not (0 <= overlap < window):
        raise ValueError(f"overlap must satisfy 0 <= overlap < window, got {overlap}")
    stride = window - overlap
    starts = list(range(0, num_frames - window + 1, stride))
    if starts[-1] != num_frames - window:
        starts.append(num_frames - window)
    return np.asarray(starts, dtype=np.int64)


def make_windows(seq: FeatureSequence, window: int, overlap: int) -> WindowBatch:
    """Cut one video's features into overlapping windows.

    The label of a window is the label of its center frame
    (start + window // 2) when the sequence carries labels.
    """
    starts = window_starts(seq.num_frames, window, overlap)
    views = np.lib.stride_tricks.sliding_window_view(seq.features, window, axis=0)
    windows = np.ascontiguousarray(views[starts].transpose(0, 2, 1))
    labels = None
    if seq.labels is not None:
        labels = seq.labels.labels[starts + window // 2].copy()
    return WindowBatch(windows=windows, window_starts=starts, window_labels=labels)


def frames_from_windows(
    window_scores: np.ndarray,
    starts: np.ndarray,
    window: int,
    num_frames: int,
    mode: str = "mean",
) -> ScoreMap:
    """Project window-level Fake scores back to a per-frame score map.

    mode "mean" (default) averages the scores of every window covering the
    frame; "max" takes their maximum; "center" assigns each window's score
    to its center frame and fills the remaining frames from the nearest
    scored frame.
    """
    window_scores = np.asarray(window_scores, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.int64)
    if window_scores.shape != starts.shape:
        raise ValueError("window_scores and starts must have equal length")
    if starts.size and (starts.min() < 0 or starts.max() + window > num_frames):
        raise ValueError("window extends outside the video")

    if mode == "mean":
        total = np.zeros(num_frames)
        count = np.zeros(num_frames)
        for s, score in zip(starts, window_scores):
            total[s : s + window] += score
            count[s : s + window] += 1
        if (count == 0).any():
            raise RuntimeError("internal error: frame not covered by any window")
        return ScoreMap(total / count)
    if mode == "max":
        best = np.full(num_frames, -1.0)
        for s, score in zip(starts, window_scores):
            np.maximum(best[s : s + window], score, out=best[s : s + window])
        if (best < 0).any():
            raise RuntimeError("internal error: frame not covered by any window")
        return ScoreMap(best)
    if mode == "center":
        frame_scores = np.full(num_frames, np.nan)
        for s, score in zip(starts, window_scores):
            frame_scores[s + window // 2] = score
        scored = np.flatnonzero(~np.isnan(frame_scores))
        if scored.size == 0:
            raise RuntimeError("internal error: no window centers")
        missing = np.flatnonzero(np.isnan(frame_scores))
        if missing.size:
            nearest = scored[np.abs(missing[:, None] - scored[None, :]).argmin(axis=1)]
            frame_scores[missing] = frame_scores[nearest]
        return ScoreMap(frame_scores)
    raise ValueError(f"unknown projection mode {mode!r}")


# -- binary feature file --


def label_path_for(feature_path: str | Path) -> Path:
    """Sibling label file: the feature path with a '.labels' suffix appended."""
    p = Path(feature_path)
    return p.with_name(p.name + ".labels")


def write_features(path: str | Path, seq: FeatureSequence) -> None:
    """Write the binary feature file, plus the sibling label file if labeled."""
    feats = np.ascontiguousarray(seq.features, dtype="<f4")
    t, d = feats.shape
    with open(path, "wb") as fh:
        fh.write(FEATURE_MAGIC)
        fh.write(struct.pack("<III", FEATURE_VERSION, t, d))
        fh.write(feats.tobytes())
    if seq.labels is not None:
        label_path_for(path).write_text(seq.labels.to_text(), encoding="ascii")


def read_features(path: str | Path, video_id: str | None = None) -> FeatureSequence:
    """Read a binary feature file; picks up the sibling label file if present."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FEATURE_MAGIC:
            raise ValueError(f"{path}: not a feature file (bad magic {magic!r})")
        version, t, d = struct.unpack("<III", fh.read(12))
        if version != FEATURE_VERSION:
            raise ValueError(f"{path}: unsupported feature file version {version}")
        data = fh.read(4 * t * d)
        if len(data) != 4 * t * d:
            raise ValueError(f"{path}: truncated feature file")
    feats = np.frombuffer(data, dtype="<f4").reshape(t, d)
    labels = None
    lp = label_path_for(path)
    if lp.exists():
        labels = SegmentationMap.from_text(lp.read_text(encoding="ascii"))
    return FeatureSequence(video_id=video_id or path.stem, features=feats, labels=labels)
