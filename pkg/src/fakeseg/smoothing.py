"""Majority-vote smoothing of noisy frame-level predictions.

For each frame, the k labels to its left and the k labels to its right are
polled separately (truncated at the map boundaries). A frame's label is
replaced only when the evidence is unanimous about direction:

  * left side empty (first frame): adopt the right majority if it differs;
  * right side empty (last frame): adopt the left majority if it differs;
  * both sides present: change only when both majorities agree with each
    other and disagree with the current label.

All votes are taken against the original input map and written to a fresh
output, so the result is order-independent (no cascade from earlier
rewrites). A tied side has no majority and never forces a change. With
k = 0 the operation is a no-op.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .segmap import ScoreMap, SegmentationMap

# default neighborhood: 7 per side, i.e. a 15-frame voting window


@dataclass(frozen=True)
class SmoothConfig:
    k: int = 7

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")


def _majority(window: np.ndarray) -> int | None:
    """0 or 1 when one label strictly dominates, None on tie or empty."""
    if window.size == 0:
        return None
    fakes = int(window.sum())
    reals = window.size - fakes
    if fakes > reals:
        return 1
    if reals > fakes:
        return 0
    return None


def smooth(pred: SegmentationMap, cfg: SmoothConfig) -> SegmentationMap:
    """Majority-vote smoothing; output length equals input length."""
    k = cfg.k
    labels = pred.labels
    out = labels.copy()
    if k == 0:
        return SegmentationMap(out)
    n = labels.size
    for i in range(n):
        left = labels[max(0, i - k) : i]
        right = labels[i + 1 : i + 1 + k]
        m_left = _majority(left)
        m_right = _majority(right)
        if left.size == 0:
            if m_right is not None and labels[i] != m_right:
                out[i] = m_right
        elif right.size == 0:
            if m_left is not None and labels[i] != m_left:
                out[i] = m_left
        elif m_left is not None and m_left == m_right and labels[i] != m_left:
            out[i] = m_left
    return SegmentationMap(out)


def smooth_scores(scores: ScoreMap, threshold: float, cfg: SmoothConfig) -> SegmentationMap:
    """Threshold scores (Fake when score >= threshold), then smooth."""
    return smooth(scores.threshold(threshold), cfg)
