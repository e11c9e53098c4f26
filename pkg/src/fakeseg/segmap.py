"""Per-frame Real/Fake label maps and score maps.

A segmentation map assigns one Boolean label (Real or Fake) to every frame
of a video; a score map carries the per-frame probability of Fake. These two
carriers are the currency of the whole toolkit: planners render them,
models emit them, metrics consume them.

Serialization formats:
  * text: one ASCII character per frame, ``R``/``F``, newline-terminated.
  * JSON: ``{"labels": [0, 1, ...]}`` where 1 means Fake.
"""

from __future__ import annotations

import json
from enum import IntEnum
from typing import Iterable

import numpy as np


class FrameLabel(IntEnum):
    """Binary frame class. Real sorts below Fake; 1 means Fake on the wire."""

    REAL = 0
    FAKE = 1

    @property
    def char(self) -> str:
        return "F" if self is FrameLabel.FAKE else "R"

    @classmethod
    def from_char(cls, c: str) -> "FrameLabel":
        if c == "R":
            return cls.REAL
        if c == "F":
            return cls.FAKE
        raise ValueError(f"invalid frame label character {c!r} (expected 'R' or 'F')")


class SegmentationMap:
    """Immutable per-frame Real/Fake labeling of one video.

    Args:
        labels: per-frame labels; anything coercible to a 0/1 integer array
            (FrameLabel values, bools, or 0/1 ints). Length must be >= 1.
    """

    __slots__ = ("labels",)

    def __init__(self, labels: Iterable[int] | np.ndarray):
        arr = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a segmentation map needs a 1-D sequence of at least one label")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("labels must be 0 (Real) or 1 (Fake)")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SegmentationMap is immutable")

    def __len__(self) -> int:
        return int(self.labels.size)

    def __getitem__(self, i: int) -> FrameLabel:
        return FrameLabel(int(self.labels[i]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SegmentationMap):
            return NotImplemented
        return len(self) == len(other) and bool((self.labels == other.labels).all())

    def __repr__(self) -> str:
        body = self.to_text().rstrip("\n")
        if len(body) > 40:
            body = body[:37] + "..."
        return f"SegmentationMap({body!r}, T={len(self)})"

    @property
    def fake_ratio(self) -> float:
        """Fraction of frames labeled Fake."""
        return float(self.labels.mean())

    @classmethod
    def all_real(cls, length: int) -> "SegmentationMap":
        return cls(np.zeros(length, dtype=np.uint8))

    # -- text format: one 'R'/'F' char per frame, newline-terminated --

    def to_text(self) -> str:
        return "".join("F" if v else "R" for v in self.labels) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SegmentationMap":
        body = text.rstrip("\n")
        bad = set(body) - {"R", "F"}
        if bad:
            raise ValueError(f"invalid characters in map text: {sorted(bad)}")
        return cls(np.frombuffer(body.encode("ascii"), dtype=np.uint8) == ord("F"))

    # -- JSON format: {"labels": [0, 1, ...]}, 1 = Fake --

    def to_json(self) -> str:
        return json.dumps({"labels": [int(v) for v in self.labels]})

    @classmethod
    def from_json(cls, text: str) -> "SegmentationMap":
        data = json.loads(text)
        if not isinstance(data, dict) or "labels" not in data:
            raise ValueError('map JSON must be an object with a "labels" array')
        return cls(data["labels"])


class ScoreMap:
    """Per-frame probability of Fake, aligned with a SegmentationMap."""

    __slots__ = ("scores",)

    def __init__(self, scores: Iterable[float] | np.ndarray):
        arr = np.asarray(scores, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a score map needs a 1-D sequence of at least one score")
        if not np.isfinite(arr).all():
            raise ValueError("scores must be finite")
        if (arr < 0).any() or (arr > 1).any():
            raise ValueError("scores must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "scores", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ScoreMap is immutable")

    def __len__(self) -> int:
        return int(self.scores.size)

    def threshold(self, threshold: float) -> SegmentationMap:
        """Label every frame Fake whose score is >= `threshold`."""
        return SegmentationMap(self.scores >= threshold)

    def to_json(self) -> str:
        return json.dumps({"scores": [float(v) for v in self.scores]})

    @classmethod
    def from_json(cls, text: str) -> "ScoreMap":
        data = json.loads(text)
        if not isinstance(data, dict) or "scores" not in data:
            raise ValueError('score JSON must be an object with a "scores" array')
        return cls(data["scores"])


def segments_of(segmap: SegmentationMap) -> list[tuple[int, int]]:
    """Maximal runs of Fake frames as (start, length) pairs, sorted by start."""
    labels = segmap.labels
    padded = np.concatenate(([0], labels, [0])).astype(np.int8)
    diff = np.diff(padded)
    starts = np.flatnonzero(diff == 1)
    ends = np.flatnonzero(diff == -1)
    return [(int(s), int(e - s)) for s, e in zip(starts, ends)]
