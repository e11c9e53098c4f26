"""Synthetic per-frame features with controllable class separation.

Emulates a frozen image encoder's per-frame embeddings so the temporal
pipeline can be trained and verified at desk scale with closed-form
oracles. Frames are Gaussian around a class mean, optionally mixed with the
previous frame (AR(1)) to create temporal correlation:

    x[0] = sample(mean(label[0]), noise)
    x[t] = (1 - rho) * sample(mean(label[t]), noise) + rho * x[t - 1]

The two class means sit `separation * noise_std` apart in Euclidean
distance, spread evenly over all coordinates, so a nearest-mean classifier
has error Phi(-separation / 2) at rho = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .injection import SegmentPlan, render_map
from .prng import derive_seed
from .windowing import FeatureSequence


@dataclass(frozen=True)
class SynthConfig:
    """Generator settings.

    Attributes:
        dim: feature dimension per frame.
        separation: distance between class means in units of noise_std.
        temporal_rho: AR(1) mixing weight of the previous frame, in [0, 1).
        noise_std: per-coordinate sampling noise.
        seed: master seed; each video derives its own stream from
            (seed, video id).
    """

    dim: int
    separation: float = 6.0
    temporal_rho: float = 0.0
    noise_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.separation < 0:
            raise ValueError("separation must be >= 0")
        if not (0.0 <= self.temporal_rho < 1.0):
            raise ValueError("temporal_rho must lie in [0, 1)")
        if self.noise_std <= 0:
            raise ValueError("noise_std must be positive")


def class_means(cfg: SynthConfig) -> tuple[np.ndarray, np.ndarray]:
    """(real_mean, fake_mean), separated by separation * noise_std.

    The means differ along a sign-alternating direction rather than the
    all-ones one: a uniform shift of every channel is exactly what layer
    normalization subtracts, so it would be invisible to the classifier.
    """
    delta = cfg.separation * cfg.noise_std / np.sqrt(cfg.dim)
    signs = np.where(np.arange(cfg.dim) % 2 == 0, 1.0, -1.0)
    half = delta / 2.0 * signs
    return -half, half


def synth_video(plan: SegmentPlan, length: int, cfg: SynthConfig) -> FeatureSequence:
    """Generate one video's features; labels come from rendering the plan."""
    labels = render_map(plan, length)
    mu_real, mu_fake = class_means(cfg)
    rng = np.random.default_rng(derive_seed(cfg.seed, plan.video_id))
    means = np.where(labels.labels[:, None], mu_fake, mu_real)
    draws = means + cfg.noise_std * rng.standard_normal((length, cfg.dim))
    feats = np.empty_like(draws)
    feats[0] = draws[0]
    rho = cfg.temporal_rho
    for t in range(1, length):
        feats[t] = (1.0 - rho) * draws[t] + rho * feats[t - 1]
    return FeatureSequence(video_id=plan.video_id, features=feats.astype(np.float32), labels=labels)
