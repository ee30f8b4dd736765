"""Paired datasets: generation, splits, binary round-trips, batching."""

import io
import os

import numpy as np
import pytest

from mirlab.data import (
    HOLDOUT_EVERY,
    PAIRINGS,
    build_dataset,
    dequantize,
    load,
    quantize,
    regenerate_episode,
    sample_batch,
    save,
)
from mirlab.errors import FormatError


def test_build_dataset_shape_and_split(small_dataset):
    ds = small_dataset
    assert len(ds.trajectories) == 8 * len(PAIRINGS)
    holdout = ds.split("holdout")
    train = ds.split("train")
    assert len(holdout) == len(ds.trajectories) // HOLDOUT_EVERY
    assert len(train) + len(holdout) == len(ds.trajectories)
    for t in ds.trajectories:
        assert t.actions.shape == (100, 3)
        assert t.obs_a.shape == (100, 2, 3, 32, 32)
        assert t.obs_a.dtype == np.uint8
        assert t.pairing in PAIRINGS


def test_quantize_round_trip_on_stored_values():
    img = np.arange(256, dtype=np.float64).reshape(1, -1) / 255.0
    q = quantize(img)
    assert np.array_equal(q, np.arange(256, dtype=np.uint8).reshape(1, -1))
    assert np.array_equal(quantize(dequantize(q)), q)


def test_actions_survive_float32_round_trip(small_dataset):
    for t in small_dataset.trajectories[:4]:
        assert np.array_equal(t.actions, t.actions.astype(np.float32).astype(np.float64))


def test_save_load_round_trip(tmp_path, small_dataset):
    path = tmp_path / "d.mird"
    save(small_dataset, path)
    loaded = load(path)
    assert len(loaded.trajectories) == len(small_dataset.trajectories)
    for a, b in zip(small_dataset.trajectories, loaded.trajectories):
        assert a.meta() == b.meta()
        assert np.array_equal(a.actions, b.actions)
        assert np.array_equal(a.obs_a, b.obs_a)
        assert np.array_equal(a.obs_b, b.obs_b)
    path2 = tmp_path / "d2.mird"
    save(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_generation_is_reproducible(small_dataset):
    t = small_dataset.trajectories[0]
    again = regenerate_episode(t.meta())
    assert np.array_equal(t.actions, again.actions)
    assert np.array_equal(t.obs_a, again.obs_a)
    assert np.array_equal(t.obs_b, again.obs_b)


def test_paired_streams_share_physics(small_dataset):
    """Both renderings come from the same underlying state sequence, so
    they differ only visually: their actions agree by construction and
    the observation tensors are distinct."""
    for t in small_dataset.trajectories[:2]:
        assert not np.array_equal(t.obs_a, t.obs_b)


def test_bad_magic_raises_with_offset(tmp_path):
    p = tmp_path / "x.mird"
    p.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(FormatError) as e:
        load(p)
    assert e.value.offset == 0


def test_truncated_file_raises(tmp_path, small_dataset):
    p = tmp_path / "d.mird"
    save(small_dataset, p)
    data = p.read_bytes()
    p.write_bytes(data[: len(data) // 2])
    with pytest.raises(FormatError):
        load(p)


def test_sample_batch_contract(small_dataset):
    rng = np.random.default_rng(0)
    b = sample_batch(small_dataset, batch_size=2, window=50, rng=rng)
    assert b.obs_a.shape == (2, 50, 2, 3, 32, 32)
    assert b.obs_a.dtype == np.float64
    assert 0.0 <= b.obs_a.min() and b.obs_a.max() <= 1.0
    assert b.actions.shape == (2, 50, 3)
    assert len(b.offsets) == len(b.seq_indices) == 2
    for s in range(2):
        for (i, j) in b.gcp_pairs[s]:
            assert 0 <= i < j < 50
            assert j - i <= 20


def test_sample_batch_deterministic(small_dataset):
    a = sample_batch(small_dataset, 2, 50, np.random.default_rng(42))
    b = sample_batch(small_dataset, 2, 50, np.random.default_rng(42))
    assert np.array_equal(a.obs_a, b.obs_a)
    assert np.array_equal(a.seq_indices, b.seq_indices)
    assert np.array_equal(a.gcp_pairs, b.gcp_pairs)
