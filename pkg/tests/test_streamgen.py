import math

import numpy as np
import pytest

from ffm.errors import ConfigurationError
from ffm.streamgen import StreamConfig, concept_weight, drift_boundaries, make_stream


def test_weight_midpoint():
    assert concept_weight(100, 100, 7.0) == 0.5


def test_weight_step_limit():
    assert concept_weight(99, 100, 1e-9) == pytest.approx(0.0, abs=1e-6)
    assert concept_weight(101, 100, 1e-9) == pytest.approx(1.0, abs=1e-6)


def test_weight_matches_direct_sigmoid():
    assert concept_weight(110, 100, 10) == pytest.approx(0.7310585786300049, abs=1e-15)
    for t in range(0, 200, 7):
        assert concept_weight(t, 100, 10) == pytest.approx(1 / (1 + math.exp(-(t - 100) / 10)), rel=1e-14)


def test_experiment_one_boundaries_and_shape():
    cfg = StreamConfig(500, 200, 500, 3, "sudden", seed=3)
    s = make_stream(cfg)
    assert s.boundaries == [125, 250, 375]
    assert len(s.chunks) == 500
    assert s.chunks[0].shape == (200, 500)
    assert s.chunks[499].shape == (200, 500)
    changes = np.flatnonzero(np.diff(s.ground_truth)) + 1
    assert list(changes) == [125, 250, 375]


def test_no_drift_single_concept():
    s = make_stream(StreamConfig(20, 10, 8, 0, seed=1))
    assert not s.ground_truth.any()


@pytest.mark.parametrize("drift", ["sudden", "gradual", "incremental"])
def test_determinism(drift):
    cfg = StreamConfig(30, 16, 12, 2, drift, seed=99)
    a, b = make_stream(cfg), make_stream(cfg)
    np.testing.assert_array_equal(a.ground_truth, b.ground_truth)
    for t in (0, 9, 10, 29):
        assert a.chunks[t].tobytes() == b.chunks[t].tobytes()
    # access order does not matter
    assert a.chunks[29].tobytes() == make_stream(cfg).materialize()[29].tobytes()


def test_different_seeds_differ():
    a = make_stream(StreamConfig(5, 4, 4, 1, seed=1)).chunks[0]
    b = make_stream(StreamConfig(5, 4, 4, 1, seed=2)).chunks[0]
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("n_chunks,n_drifts", [(10, 0), (10, 3), (37, 5), (100, 9), (12, 11)])
@pytest.mark.parametrize("drift", ["sudden", "gradual", "incremental"])
def test_ground_truth_piecewise(n_chunks, n_drifts, drift):
    s = make_stream(StreamConfig(n_chunks, 2, 4, n_drifts, drift))
    gt = s.ground_truth
    assert len(gt) == n_chunks
    assert np.count_nonzero(np.diff(gt)) == n_drifts
    assert len(np.unique(gt)) == n_drifts + 1


def test_boundaries_round_half_up():
    assert drift_boundaries(5, 1) == [3]
    assert drift_boundaries(1000, 3) == [250, 500, 750]


def test_recurring_reuses_first_concept():
    s = make_stream(StreamConfig(40, 64, 16, 3, "sudden", recurring=True, seed=4))
    gt = s.ground_truth
    assert gt[-1] == 0 and gt[0] == 0
    assert np.count_nonzero(np.diff(gt)) == 3
    last, first = s.chunks[-1].mean(axis=0), s.chunks[0].mean(axis=0)
    middle = s.chunks[15].mean(axis=0)
    assert np.linalg.norm(last - first) < np.linalg.norm(middle - first)


def test_sudden_segments_separable():
    s = make_stream(StreamConfig(40, 256, 64, 1, "sudden", seed=11))
    means = np.stack([c.mean(axis=0) for c in s.chunks])
    seg_a, seg_b = means[2:18], means[22:38]
    delta = seg_b.mean(axis=0) - seg_a.mean(axis=0)
    unit = delta / np.linalg.norm(delta)
    # spread of chunk means along the direction separating the segments
    within = max((seg_a @ unit).std(), (seg_b @ unit).std())
    assert np.linalg.norm(delta) > 5 * within


def test_gradual_mixes_and_incremental_blends():
    cfg_g = StreamConfig(100, 400, 8, 1, "gradual", seed=5)
    cfg_i = StreamConfig(100, 400, 8, 1, "incremental", seed=5)
    g, i = make_stream(cfg_g), make_stream(cfg_i)
    b = g.boundaries[0]
    # at the boundary both concepts contribute roughly equally
    prev_mean = g.centers[0].mean(axis=0)
    next_mean = g.centers[1].mean(axis=0)
    mid = 0.5 * (prev_mean + next_mean)
    for s in (g, i):
        m = s.chunks[b].mean(axis=0)
        assert np.linalg.norm(m - mid) < np.linalg.norm(m - prev_mean)
        assert np.linalg.norm(m - mid) < np.linalg.norm(m - next_mean)


def test_class_labels_carried_as_metadata():
    s = make_stream(StreamConfig(4, 50, 3, 0, seed=2))
    X, y = s.chunk_with_labels(1)
    assert X.shape == (50, 3) and set(np.unique(y)) <= {0, 1}


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_chunks=0, chunk_size=1, n_features=1),
        dict(n_chunks=3, chunk_size=1, n_features=1, n_drifts=3),
        dict(n_chunks=3, chunk_size=0, n_features=1),
        dict(n_chunks=3, chunk_size=1, n_features=1, drift_type="abrupt"),
        dict(n_chunks=3, chunk_size=1, n_features=1, seed=-1),
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(ConfigurationError):
        StreamConfig(**kwargs)
