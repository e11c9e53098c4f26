"""Training loop (Adam + early stopping) and whole-video prediction."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from .segmap import ScoreMap
from .transformer import SequenceClassifier, cross_entropy, forward_with_cache, loss_and_grads
from .windowing import FeatureSequence, frames_from_windows, make_windows

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings.

    Training stops once validation loss has failed to improve for more than
    `early_stop_patience` consecutive epochs, and the parameters from the
    best validation epoch are restored.
    """

    batch_size: int = 64
    learning_rate: float = 1e-4
    max_epochs: int = 100
    early_stop_patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("batch_size and max_epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    train_accuracy: float
    val_loss: float
    val_accuracy: float


@dataclass(frozen=True)
class TrainHistory:
    epochs: tuple[EpochStats, ...]
    best_epoch: int
    stopped_early: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "epochs": [asdict(e) for e in self.epochs],
            "best_epoch": self.best_epoch,
            "stopped_early": self.stopped_early,
        }


def evaluate(model: SequenceClassifier, x: np.ndarray, y: np.ndarray, batch_size: int = 256):
    """Mean cross-entropy and accuracy in inference mode."""
    total_loss = 0.0
    correct = 0
    for lo in range(0, len(x), batch_size):
        xb, yb = x[lo : lo + batch_size], y[lo : lo + batch_size]
        logits, probs, _ = forward_with_cache(model, xb)
        total_loss += cross_entropy(logits, yb) * len(xb)
        correct += int((probs.argmax(axis=1) == yb).sum())
    return total_loss / len(x), correct / len(x)


def train(
    model: SequenceClassifier,
    train_set: tuple[np.ndarray, np.ndarray],
    val_set: tuple[np.ndarray, np.ndarray],
    cfg: TrainConfig,
) -> tuple[SequenceClassifier, TrainHistory]:
    """Train in place with Adam; returns the model (restored to its best
    validation epoch) and the per-epoch history.

    Fully deterministic given the seed: shuffling and dropout draw from one
    seeded generator in a fixed order.
    """
    x_tr, y_tr = train_set
    x_val, y_val = val_set
    y_tr = np.asarray(y_tr)
    y_val = np.asarray(y_val)
    if len(x_tr) == 0 or len(x_val) == 0:
        raise ValueError("training and validation sets must be non-empty")
    if np.unique(y_tr).size < 2:
        raise ValueError("training set contains a single class; need both Real and Fake windows")

    rng = np.random.default_rng(cfg.seed)
    m = {k: np.zeros_like(v) for k, v in model.params.items()}
    v = {k: np.zeros_like(p) for k, p in model.params.items()}
    step = 0
    lr = model.dtype.type(cfg.learning_rate)

    best_val = np.inf
    best_params = model.copy_params()
    best_epoch = 0
    wait = 0
    stopped_early = False
    history: list[EpochStats] = []

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(x_tr))
        run_loss = 0.0
        run_correct = 0
        for lo in range(0, len(order), cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            xb, yb = x_tr[idx], y_tr[idx]
            loss, probs, grads = loss_and_grads(model, xb, yb, train=True, rng=rng)
            run_loss += loss * len(idx)
            run_correct += int((probs.argmax(axis=1) == yb).sum())
            step += 1
            bias1 = 1.0 - ADAM_BETA1**step
            bias2 = 1.0 - ADAM_BETA2**step
            for name, g in grads.items():
                m[name] = ADAM_BETA1 * m[name] + (1 - ADAM_BETA1) * g
                v[name] = ADAM_BETA2 * v[name] + (1 - ADAM_BETA2) * (g * g)
                update = (m[name] / bias1) / (np.sqrt(v[name] / bias2) + ADAM_EPS)
                model.params[name] -= lr * update.astype(model.dtype)

        val_loss, val_acc = evaluate(model, x_val, y_val, cfg.batch_size)
        history.append(
            EpochStats(
                epoch=epoch,
                train_loss=run_loss / len(x_tr),
                train_accuracy=run_correct / len(x_tr),
                val_loss=val_loss,
                val_accuracy=val_acc,
            )
        )
        if val_loss < best_val:
            best_val = val_loss
            best_params = model.copy_params()
            best_epoch = epoch
            wait = 0
        else:
            wait += 1
            if wait > cfg.early_stop_patience:
                stopped_early = True
                break

    model.params = best_params
    return model, TrainHistory(tuple(history), best_epoch=best_epoch, stopped_early=stopped_early)


def predict_video(
    model: SequenceClassifier,
    seq: FeatureSequence,
    overlap: int,
    mode: str = "mean",
    batch_size: int = 256,
) -> ScoreMap:
    """Frame-level Fake scores for one video: window, classify, project back."""
    w = model.config.window
    batch = make_windows(seq, w, overlap)
    scores = np.empty(batch.num_windows)
    for lo in range(0, batch.num_windows, batch_size):
        _, probs, _ = forward_with_cache(model, batch.windows[lo : lo + batch_size])
        scores[lo : lo + batch_size] = probs[:, 1]
    return frames_from_windows(scores, batch.window_starts, w, seq.num_frames, mode=mode)
