import numpy as np
import pytest

from fakeseg import (
    FeatureSequence,
    SequenceClassifier,
    TrainConfig,
    TransformerConfig,
    evaluate,
    predict_video,
    train,
)

CFG = TransformerConfig(
    input_dim=8, window=3, num_blocks=1, num_heads=2, head_dim=4,
    ff_hidden=16, mlp_hidden=(8,), dropout=0.1,
)


def _separable_windows(n, cfg, seed, gap=3.0):
    """n windows per class; the class offset alternates sign across channels
    so layer normalization cannot cancel it."""
    rng = np.random.default_rng(seed)
    signs = np.where(np.arange(cfg.input_dim) % 2 == 0, 1.0, -1.0)
    offset = gap / 2 * signs
    x0 = rng.standard_normal((n, cfg.window, cfg.input_dim)) - offset
    x1 = rng.standard_normal((n, cfg.window, cfg.input_dim)) + offset
    x = np.concatenate([x0, x1]).astype(np.float32)
    y = np.concatenate([np.zeros(n, dtype=int), np.ones(n, dtype=int)])
    perm = rng.permutation(len(y))
    return x[perm], y[perm]


def test_training_reaches_high_accuracy_on_separable_data():
    train_set = _separable_windows(150, CFG, seed=0)
    val_set = _separable_windows(40, CFG, seed=1)
    model = SequenceClassifier.initialize(CFG, seed=0)
    cfg = TrainConfig(batch_size=32, learning_rate=1e-3, max_epochs=20, early_stop_patience=5, seed=0)
    model, history = train(model, train_set, val_set, cfg)
    assert len(history.epochs) <= 20
    best = history.epochs[history.best_epoch - 1]
    assert best.val_accuracy >= 0.99


def test_plateau_with_patience_one_stops_after_two_checks():
    # a vanishing learning rate leaves parameters (and val loss) unchanged,
    # so every epoch after the first is non-improving
    train_set = _separable_windows(30, CFG, seed=2)
    val_set = _separable_windows(10, CFG, seed=3)
    model = SequenceClassifier.initialize(CFG, seed=0)
    cfg = TrainConfig(batch_size=16, learning_rate=1e-30, max_epochs=50, early_stop_patience=1, seed=0)
    model, history = train(model, train_set, val_set, cfg)
    assert history.stopped_early
    assert history.best_epoch == 1
    assert len(history.epochs) == 3  # epoch 1 improves, epochs 2 and 3 do not


def test_training_is_deterministic():
    train_set = _separable_windows(60, CFG, seed=4)
    val_set = _separable_windows(20, CFG, seed=5)
    cfg = TrainConfig(batch_size=32, learning_rate=1e-3, max_epochs=5, early_stop_patience=3, seed=9)
    m1, h1 = train(SequenceClassifier.initialize(CFG, seed=1), train_set, val_set, cfg)
    m2, h2 = train(SequenceClassifier.initialize(CFG, seed=1), train_set, val_set, cfg)
    assert h1 == h2
    for name in m1.params:
        assert np.array_equal(m1.params[name], m2.params[name]), name


def test_training_restores_best_epoch_parameters():
    train_set = _separable_windows(60, CFG, seed=6)
    val_set = _separable_windows(20, CFG, seed=7)
    cfg = TrainConfig(batch_size=32, learning_rate=1e-3, max_epochs=8, early_stop_patience=2, seed=0)
    model, history = train(SequenceClassifier.initialize(CFG, seed=2), train_set, val_set, cfg)
    val_loss, _ = evaluate(model, *val_set, batch_size=cfg.batch_size)
    assert val_loss == min(e.val_loss for e in history.epochs)
    assert history.epochs[history.best_epoch - 1].val_loss == val_loss


def test_loss_decreases_over_first_five_epochs_for_ten_seeds():
    cfg = TrainConfig(batch_size=32, learning_rate=1e-3, max_epochs=5, early_stop_patience=5, seed=0)
    for seed in range(10):
        train_set = _separable_windows(50, CFG, seed=100 + seed)
        val_set = _separable_windows(15, CFG, seed=200 + seed)
        model = SequenceClassifier.initialize(CFG, seed=seed)
        _, history = train(model, train_set, val_set, TrainConfig(
            batch_size=cfg.batch_size, learning_rate=cfg.learning_rate,
            max_epochs=cfg.max_epochs, early_stop_patience=cfg.early_stop_patience, seed=seed,
        ))
        assert history.epochs[4].val_loss < history.epochs[0].val_loss, f"seed {seed}"


def test_single_class_training_set_is_rejected():
    x, _ = _separable_windows(10, CFG, seed=8)
    y = np.zeros(len(x), dtype=int)
    with pytest.raises(ValueError, match="single class"):
        train(SequenceClassifier.initialize(CFG, seed=0), (x, y), (x, y), TrainConfig())


def test_empty_split_is_rejected():
    x, y = _separable_windows(10, CFG, seed=8)
    empty = (x[:0], y[:0])
    with pytest.raises(ValueError, match="non-empty"):
        train(SequenceClassifier.initialize(CFG, seed=0), (x, y), empty, TrainConfig())


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(early_stop_patience=0)


def test_predict_video_constant_features_give_constant_scores():
    model = SequenceClassifier.initialize(CFG, seed=0)
    feats = np.ones((12, CFG.input_dim), dtype=np.float32)
    seq = FeatureSequence(video_id="c", features=feats)
    scores = predict_video(model, seq, overlap=2)
    assert np.allclose(scores.scores, scores.scores[0])
    assert len(scores) == 12


def test_predict_video_too_short_is_an_error():
    model = SequenceClassifier.initialize(CFG, seed=0)
    seq = FeatureSequence(video_id="s", features=np.zeros((2, CFG.input_dim), dtype=np.float32))
    with pytest.raises(ValueError, match="window"):
        predict_video(model, seq, overlap=2)


def test_history_serialization():
    train_set = _separable_windows(20, CFG, seed=9)
    val_set = _separable_windows(10, CFG, seed=10)
    cfg = TrainConfig(batch_size=16, learning_rate=1e-3, max_epochs=2, early_stop_patience=2, seed=0)
    _, history = train(SequenceClassifier.initialize(CFG, seed=0), train_set, val_set, cfg)
    d = history.to_dict()
    assert len(d["epochs"]) == 2
    assert {"epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy"} <= set(d["epochs"][0])
