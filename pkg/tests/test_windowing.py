import numpy as np
import pytest

from fakeseg import (
    FeatureSequence,
    SegmentationMap,
    frames_from_windows,
    make_windows,
    read_features,
    window_starts,
    write_features,
)
from fakeseg.windowing import label_path_for


def _seq(t, d=3, labels=None, seed=0):
    feats = np.random.default_rng(seed).standard_normal((t, d)).astype(np.float32)
    smap = SegmentationMap(labels) if labels is not None else None
    return FeatureSequence(video_id="v", features=feats, labels=smap)


# -- window geometry --


def test_starts_stride_one():
    assert window_starts(10, 5, 4).tolist() == [0, 1, 2, 3, 4, 5]


def test_starts_single_window():
    assert window_starts(5, 5, 0).tolist() == [0]


def test_starts_with_right_aligned_tail():
    # stride 3 covers 0,3,6 but leaves frame 11 uncovered -> extra start at 7
    assert window_starts(12, 5, 2).tolist() == [0, 3, 6, 7]


def test_starts_validation():
    with pytest.raises(ValueError):
        window_starts(4, 5, 0)
    with pytest.raises(ValueError):
        window_starts(10, 5, 5)
    with pytest.raises(ValueError):
        window_starts(10, 5, -1)


def test_coverage_property():
    rng = np.random.default_rng(0)
    for _ in range(200):
        t = int(rng.integers(1, 60))
        w = int(rng.integers(1, t + 1))
        overlap = int(rng.integers(0, w))
        starts = window_starts(t, w, overlap)
        covered = np.zeros(t, dtype=bool)
        for s in starts:
            covered[s : s + w] = True
        assert covered.all()
        assert starts[-1] == t - w
        assert (np.diff(starts) > 0).all()


def test_stride_one_interior_coverage_count():
    t, w = 30, 5
    starts = window_starts(t, w, w - 1)
    count = np.zeros(t, dtype=int)
    for s in starts:
        count[s : s + w] += 1
    assert (count[w - 1 : t - w + 1] == w).all()


# -- window content and labels --


def test_window_content_matches_slices():
    seq = _seq(12, d=4)
    batch = make_windows(seq, 5, 2)
    for row, s in zip(batch.windows, batch.window_starts):
        assert np.array_equal(row, seq.features[s : s + 5])


def test_center_frame_labels():
    labels = [0, 0, 0, 1, 1, 1, 1, 0, 0, 0]
    seq = _seq(10, labels=labels)
    batch = make_windows(seq, 5, 4)
    expected = [labels[s + 2] for s in batch.window_starts]
    assert batch.window_labels.tolist() == expected


def test_constant_labels_make_constant_window_labels():
    seq = _seq(9, labels=[1] * 9)
    batch = make_windows(seq, 4, 1)
    assert set(batch.window_labels.tolist()) == {1}


def test_unlabeled_sequence_has_no_window_labels():
    batch = make_windows(_seq(8), 3, 0)
    assert batch.window_labels is None


# -- frame projection --


def test_single_window_projection():
    scores = frames_from_windows(np.array([0.7]), np.array([0]), 6, 6)
    assert np.allclose(scores.scores, 0.7)


def test_two_window_overlap_example():
    scores = frames_from_windows(np.array([1.0, 0.0]), np.array([0, 1]), 5, 6)
    assert scores.scores[0] == 1.0
    assert np.allclose(scores.scores[1:5], 0.5)
    assert scores.scores[5] == 0.0


def test_constant_scores_project_to_constant():
    starts = window_starts(20, 5, 4)
    scores = frames_from_windows(np.full(starts.size, 0.42), starts, 5, 20)
    assert np.allclose(scores.scores, 0.42)


def test_projection_permutation_invariance_and_linearity():
    rng = np.random.default_rng(1)
    starts = window_starts(15, 4, 2)
    w_scores = rng.random(starts.size)
    base = frames_from_windows(w_scores, starts, 4, 15).scores
    perm = rng.permutation(starts.size)
    shuffled = frames_from_windows(w_scores[perm], starts[perm], 4, 15).scores
    assert np.allclose(base, shuffled)
    half = frames_from_windows(w_scores / 2, starts, 4, 15).scores
    assert np.allclose(half, base / 2)


def test_projection_uncovered_frame_is_internal_error():
    with pytest.raises(RuntimeError, match="not covered"):
        frames_from_windows(np.array([0.5]), np.array([0]), 3, 6)


def test_projection_geometry_validation():
    with pytest.raises(ValueError):
        frames_from_windows(np.array([0.5]), np.array([4]), 3, 6)
    with pytest.raises(ValueError):
        frames_from_windows(np.array([0.5, 0.5]), np.array([0]), 3, 6)


def test_projection_max_and_center_modes():
    starts = np.array([0, 1])
    w_scores = np.array([0.2, 0.8])
    mx = frames_from_windows(w_scores, starts, 5, 6, mode="max").scores
    assert mx[0] == 0.2 and (mx[1:] == 0.8).all()
    ct = frames_from_windows(w_scores, starts, 5, 6, mode="center").scores
    assert ct[2] == 0.2 and ct[3] == 0.8
    assert ct[0] == ct[1] == 0.2  # nearest-center fill
    assert ct[4] == ct[5] == 0.8
    with pytest.raises(ValueError):
        frames_from_windows(w_scores, starts, 5, 6, mode="median")


# -- feature file format --


def test_feature_file_round_trip(tmp_path):
    seq = _seq(17, d=5, labels=([0] * 9 + [1] * 8), seed=3)
    path = tmp_path / "v.feat"
    write_features(path, seq)
    back = read_features(path)
    assert back.video_id == "v"
    assert np.array_equal(back.features, seq.features)
    assert back.features.dtype == np.float32
    assert back.labels == seq.labels
    assert label_path_for(path).name == "v.feat.labels"


def test_feature_file_without_labels(tmp_path):
    seq = _seq(6, d=2)
    write_features(tmp_path / "x.feat", seq)
    assert read_features(tmp_path / "x.feat").labels is None


def test_feature_file_errors(tmp_path):
    bad = tmp_path / "bad.feat"
    bad.write_bytes(b"NOPE" + b"\x00" * 12)
    with pytest.raises(ValueError, match="magic"):
        read_features(bad)

    seq = _seq(4, d=2)
    good = tmp_path / "good.feat"
    write_features(good, seq)
    data = good.read_bytes()
    (tmp_path / "trunc.feat").write_bytes(data[:-5])
    with pytest.raises(ValueError, match="truncated"):
        read_features(tmp_path / "trunc.feat")
    (tmp_path / "vers.feat").write_bytes(data[:4] + b"\x09\x00\x00\x00" + data[8:])
    with pytest.raises(ValueError, match="version"):
        read_features(tmp_path / "vers.feat")
