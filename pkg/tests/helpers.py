"""Shared test oracles and fixtures: finite differences, pairwise AUC, configs."""

from __future__ import annotations

import copy
import numpy as np

from fakeseg.transformer import SequenceClassifier, cross_entropy, forward_with_cache

MICRO_CONFIG = {
    "dataset": {
        "mode": "one",
        "seed": 7,
        "num_train_videos": 6,
        "num_val_videos": 2,
        "num_test_videos": 3,
        "num_real_test_videos": 2,
        "min_length": 250,
        "max_length": 280,
        "feature_dim": 8,
        "separation": 6.0,
        "temporal_rho": 0.1,
        "noise_std": 1.0,
    },
    "model": {
        "window": 5,
        "num_blocks": 1,
        "num_heads": 2,
        "head_dim": 8,
        "ff_hidden": 32,
        "mlp_hidden": [16],
        "dropout": 0.1,
    },
    "train": {
        "batch_size": 64,
        "learning_rate": 0.001,
        "max_epochs": 6,
        "early_stop_patience": 3,
        "seed": 1,
    },
    "eval": {"smooth_k": 7, "threshold": 0.5, "overlap": 4, "frame_mode": "mean"},
}


def micro_config_dict(**section_overrides) -> dict:
    """Deep copy of the fast test config, with per-section dict overrides."""
    cfg = copy.deepcopy(MICRO_CONFIG)
    for section, overrides in section_overrides.items():
        cfg[section].update(overrides)
    return cfg


def pairwise_auc(gt_labels: np.ndarray, scores: np.ndarray) -> float:
    """O(T^2) ROC-AUC oracle: wins + half-credit for ties over all pos/neg pairs."""
    pos = scores[gt_labels.astype(bool)]
    neg = scores[~gt_labels.astype(bool)]
    wins = 0
    ties = 0
    for a in pos:
        for b in neg:
            if a > b:
                wins += 1
            elif a == b:
                ties += 1
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def fd_gradcheck(
    model: SequenceClassifier,
    x: np.ndarray,
    y: np.ndarray,
    grads: dict[str, np.ndarray],
    rng: np.random.Generator,
    coords_per_tensor: int = 5,
    step: float = 1e-6,
    rel_tol: float = 1e-4,
    abs_tol: float = 1e-8,
) -> list[tuple[str, int, float]]:
    """Central finite differences on every parameter tensor of `model`.

    Perturbs `coords_per_tensor` random coordinates per tensor in place and
    compares the numeric derivative of the mean cross-entropy against the
    analytic gradient. A coordinate passes when the absolute difference is
    below `abs_tol` (gradient is genuinely ~0) or the relative error is
    below `rel_tol`. Returns the list of failures.
    """

    def loss_at() -> float:
        logits, _, _ = forward_with_cache(model, x)
        return cross_entropy(logits, y)

    failures = []
    for name in sorted(grads):
        flat = model.params[name].reshape(-1)
        gf = grads[name].reshape(-1)
        idxs = rng.choice(flat.size, size=min(coords_per_tensor, flat.size), replace=False)
        for i in idxs:
            orig = flat[i]
            flat[i] = orig + step
            lp = loss_at()
            flat[i] = orig - step
            lm = loss_at()
            flat[i] = orig
            numeric = (lp - lm) / (2 * step)
            diff = abs(numeric - gf[i])
            if diff <= abs_tol:
                continue
            rel = diff / max(abs(numeric), abs(gf[i]))
            if rel > rel_tol:
                failures.append((name, int(i), float(rel)))
    return failures
