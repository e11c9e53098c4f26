import numpy as np
import pytest

from fakeseg import FrameLabel, ScoreMap, SegmentationMap, render_map, segments_of
from fakeseg.injection import SegmentPlan


def test_frame_label_order_and_chars():
    assert FrameLabel.REAL < FrameLabel.FAKE
    assert FrameLabel.REAL.char == "R"
    assert FrameLabel.FAKE.char == "F"
    assert FrameLabel.from_char("F") is FrameLabel.FAKE
    with pytest.raises(ValueError):
        FrameLabel.from_char("x")


def test_map_validation():
    with pytest.raises(ValueError):
        SegmentationMap([])
    with pytest.raises(ValueError):
        SegmentationMap([0, 2])
    m = SegmentationMap([0, 1, 1])
    assert len(m) == 3
    assert m.fake_ratio == pytest.approx(2 / 3)
    assert m[1] is FrameLabel.FAKE


def test_map_is_immutable():
    m = SegmentationMap([0, 1])
    with pytest.raises(AttributeError):
        m.labels = np.array([1, 1])
    with pytest.raises(ValueError):
        m.labels[0] = 1


def test_text_round_trip():
    m = SegmentationMap.from_text("RRFFFRR\n")
    assert m.to_text() == "RRFFFRR\n"
    assert SegmentationMap.from_text(m.to_text()) == m
    with pytest.raises(ValueError):
        SegmentationMap.from_text("RRXF\n")


def test_json_round_trip():
    m = SegmentationMap([0, 1, 0, 1, 1])
    assert SegmentationMap.from_json(m.to_json()) == m
    assert SegmentationMap.from_json('{"labels": [1, 0]}').to_text() == "FR\n"
    with pytest.raises(ValueError):
        SegmentationMap.from_json("[1, 0]")


def test_score_map_validation():
    with pytest.raises(ValueError):
        ScoreMap([])
    with pytest.raises(ValueError):
        ScoreMap([0.5, 1.2])
    with pytest.raises(ValueError):
        ScoreMap([0.5, float("nan")])


def test_score_threshold_is_inclusive():
    s = ScoreMap([0.0, 0.5, 0.9])
    assert s.threshold(0.5).to_text() == "RFF\n"
    # threshold 0 labels every frame Fake, whatever the scores
    assert s.threshold(0.0).to_text() == "FFF\n"


def test_score_json_round_trip():
    s = ScoreMap([0.25, 0.75])
    back = ScoreMap.from_json(s.to_json())
    assert np.array_equal(back.scores, s.scores)


def test_segments_of_examples():
    assert segments_of(SegmentationMap.from_text("RRRR\n")) == []
    assert segments_of(SegmentationMap.from_text("RRFFFRR\n")) == [(2, 3)]
    assert segments_of(SegmentationMap.from_text("FFRRFF\n")) == [(0, 2), (4, 2)]
    assert segments_of(SegmentationMap.from_text("F\n")) == [(0, 1)]


def test_segments_round_trip_random_maps():
    rng = np.random.default_rng(42)
    for _ in range(200):
        t = int(rng.integers(1, 60))
        m = SegmentationMap(rng.integers(0, 2, size=t))
        segs = segments_of(m)
        rebuilt = render_map(SegmentPlan("v", tuple(segs)), t)
        assert rebuilt == m
        # segments are maximal runs: sorted, non-overlapping, length >= 1
        prev_end = -1
        for start, length in segs:
            assert length >= 1
            assert start > prev_end  # maximality: no two adjacent runs touch
            prev_end = start + length
