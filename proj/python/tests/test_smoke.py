import numpy as np
import pytest

import linekit


def test_distances():
    assert linekit.structural_distance([0, 0, 10, 0], [0, 1, 10, 1]) == pytest.approx(2.0)
    assert linekit.orthogonal_distance([0, 0, 10, 0], [0, 1, 10, 1]) == pytest.approx(2.0)
    assert linekit.segment_overlap([0, 0, 10, 0], [5, 0, 15, 0]) == pytest.approx(0.5)


def test_defaults():
    d = linekit.DetectionParams()
    assert d.junction_threshold == pytest.approx(1 / 65)
    assert (d.xi_avg, d.xi_inlier, d.n_samples) == (0.25, 0.75, 64)
    m = linekit.MatchParams()
    assert (m.gap, m.max_samples, m.min_spacing, m.top_k_prefilter) == (0.1, 5, 8.0, 10)


def test_detect_on_oracle_maps():
    scene = linekit.render_scene("polygon", 3, 128, 128)
    assert scene.image.shape == (128, 128)
    j, h, d = scene.oracle_maps()
    assert d.shape == (32, 32, 128)
    segments, scores = linekit.detect_segments(j, h)
    assert segments.shape[1] == 4
    assert scores.shape == (len(segments), 2)
    rep = linekit.repeatability(segments, scene.segments, np.eye(3))
    assert rep >= 0.95


def test_nw_score():
    a = np.eye(5)
    score, grid = linekit.nw_best_score(a, a, 0.1)
    assert score == pytest.approx(5.0)
    assert grid.shape == (6, 6)
    with pytest.raises(linekit.InvalidArgument):
        linekit.nw_best_score(np.zeros((0, 3)), np.zeros((0, 3)))


def test_match_and_estimate():
    size = 256
    scene = linekit.render_scene("checkerboard", 5, size, size)
    view = linekit.sample_homography(9, size, size)
    lines2 = linekit.warp_segments(scene.segments, view)
    d1 = linekit.oracle_descriptor_map(np.eye(3), size, size)
    d2 = linekit.oracle_descriptor_map(view, size, size)
    matches = linekit.match_lines(scene.segments, lines2, d1, d2)
    assert len(matches) >= 4
    idx1 = [i for i, _, _ in matches]
    idx2 = [j for _, j, _ in matches]
    h, inliers = linekit.ransac_homography(scene.segments[idx1], lines2[idx2], seed=1)
    err, ok = linekit.corner_accuracy(h, view, size, size)
    assert ok
    assert len(inliers) >= 4


def test_map_io(tmp_path):
    m = np.random.default_rng(0).random((4, 6, 3)).astype(np.float32)
    path = str(tmp_path / "m.lmap")
    linekit.write_map(m, path)
    assert np.array_equal(linekit.read_map(path), m)
    with pytest.raises(linekit.IoError):
        linekit.read_map(str(tmp_path / "missing.lmap"))


def test_adapt_oracle():
    scene = linekit.render_scene("star", 2, 96, 96)
    segments, _ = linekit.adapt_oracle(scene, n_homographies=5, seed=1)
    assert len(segments) > 0
