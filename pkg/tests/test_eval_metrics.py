"""Rank correlation, goal sampling, reward, and alignment metrics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirlab.data import PairedTrajectory
from mirlab.errors import ContractError, ValidationError
from mirlab.evaluation import (
    GoalSequence,
    HELDOUT_EMBODIMENTS,
    alignment_accuracy,
    average_ranks,
    compute_w,
    embodiment_demos,
    mean_reachability,
    reachability_eval,
    reward,
    sample_goals,
    spearman,
)


class TestSpearman:
    def test_monotone(self):
        assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0

    def test_antitone(self):
        assert spearman([1, 2, 3, 4], [40, 30, 20, 10]) == -1.0

    def test_hand_computed_case(self):
        assert abs(spearman([1, 2, 3], [1, 3, 2]) - 0.5) < 1e-12

    def test_ties_use_average_ranks(self):
        assert np.array_equal(average_ranks([10, 20, 20, 30]), [1.0, 2.5, 2.5, 4.0])

    def test_constant_input_is_an_explicit_error(self):
        with pytest.raises(ValidationError):
            spearman([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            spearman([1, 2], [1, 2, 3])
        with pytest.raises(ContractError):
            spearman([1], [2])

    @given(st.lists(st.integers(-100, 100), min_size=3, max_size=20, unique=True))
    @settings(max_examples=30, deadline=None)
    def test_invariant_under_strictly_increasing_transform(self, xs):
        ys = list(range(len(xs)))
        a = spearman(xs, ys)
        b = spearman([3.0 * x + 7.0 for x in xs], ys)
        c = spearman([np.expm1(x / 50.0) for x in xs], ys)
        assert abs(a - b) < 1e-12 and abs(a - c) < 1e-9


class TestGoals:
    def test_compute_w_hand_case(self):
        assert compute_w([[0.0], [1.0], [3.0]]) == 1.5

    def test_compute_w_translation_invariant(self):
        rng = np.random.default_rng(0)
        e = rng.standard_normal((10, 4))
        assert abs(compute_w(e) - compute_w(e + 100.0)) < 1e-9

    def test_compute_w_needs_two_frames(self):
        with pytest.raises(ContractError):
            compute_w([[1.0]])

    def test_constant_demo_is_rejected(self):
        with pytest.raises(ContractError):
            sample_goals(np.ones((40, 4)), stride=8)

    def test_stride_10_gives_10_goals(self):
        e = np.arange(100, dtype=np.float64)[:, None]
        gs = sample_goals(e, stride=10)
        assert gs.source_frames == [10, 20, 30, 40, 50, 60, 70, 80, 90, 99]
        assert gs.n_goals == 10

    def test_final_frame_always_included(self):
        e = np.arange(100, dtype=np.float64)[:, None]
        for stride in (5, 6, 7, 8, 9, 10):
            assert sample_goals(e, stride=stride).source_frames[-1] == 99

    def test_stride_5_doubles_stride_10(self):
        e = np.arange(100, dtype=np.float64)[:, None]
        assert sample_goals(e, stride=5).n_goals == 2 * sample_goals(e, stride=10).n_goals

    def test_out_of_band_stride_warns_but_runs(self, caplog):
        e = np.arange(100, dtype=np.float64)[:, None]
        with caplog.at_level("WARNING"):
            gs = sample_goals(e, stride=20)
        assert gs.n_goals == 5
        assert any("stride" in r.message for r in caplog.records)

    def test_goal_sequence_invariants(self):
        with pytest.raises(ContractError):
            GoalSequence(np.zeros((2, 4)), [5, 5], w=1.0, epsilon=0.3)
        with pytest.raises(ContractError):
            GoalSequence(np.zeros((2, 4)), [1, 5], w=0.0, epsilon=0.3)
        with pytest.raises(ContractError):
            GoalSequence(np.zeros((2, 4)), [1, 5], w=1.0, epsilon=1.5)


class TestReward:
    def test_identity_case(self):
        assert reward([1.0, 2.0], [1.0, 2.0], w=1.0, epsilon=0.3) == 1

    def test_distance_one(self):
        assert reward([1.0, 0.0], [0.0, 0.0], w=1.0, epsilon=0.3) == 1  # e^-1=.3679

    def test_distance_two(self):
        assert reward([2.0, 0.0], [0.0, 0.0], w=1.0, epsilon=0.3) == 0  # e^-4=.018

    def test_degenerate_w_rejected(self):
        with pytest.raises(ContractError):
            reward([0.0], [0.0], w=0.0, epsilon=0.3)

    @given(
        st.floats(0.01, 5.0), st.floats(0.0, 3.0),
        st.floats(0.05, 0.9), st.floats(0.05, 0.9),
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_epsilon(self, w, d, e1, e2):
        lo, hi = min(e1, e2), max(e1, e2)
        a = reward([d], [0.0], w, lo)
        b = reward([d], [0.0], w, hi)
        assert b <= a  # raising the threshold never turns 0 into 1

    def test_advance_is_monotone_and_greedy(self):
        emb = np.array([0.0])
        goals = GoalSequence(
            np.array([[0.0], [0.1], [50.0]]), [3, 6, 9], w=1.0, epsilon=0.3
        )
        assert goals.advance(emb) == 2
        assert goals.active_index == 2
        assert goals.advance(emb) == 0
        assert goals.active_index == 2  # never decreases


class _FakeModel:
    """Maps an observation stack to handcrafted embeddings via its mean."""

    def embed_array(self, obs):
        obs = np.asarray(obs)
        vals = obs.reshape(obs.shape[0], -1).mean(axis=1)
        return np.stack([vals, np.zeros_like(vals)], axis=1)


def _fake_traj(obs_a, obs_b):
    t = obs_a.shape[0]
    return PairedTrajectory(
        task_id="red_on_green", seed=0, pairing="dr_invisible",
        domain_kind_a="domain_randomized", domain_kind_b="invisible_arm",
        split="holdout", actions=np.zeros((t, 3)), obs_a=obs_a, obs_b=obs_b,
    )


class TestReachability:
    def test_monotone_observations_give_rho_one(self):
        obs = (np.arange(20)[:, None, None, None, None]
               * np.ones((20, 2, 3, 32, 32)) * 10).astype(np.uint8)
        traj = _fake_traj(obs, obs.copy())
        assert reachability_eval(_FakeModel(), traj, cross=False) == 1.0
        assert reachability_eval(_FakeModel(), traj, cross=True) == 1.0

    def test_constant_embeddings_raise_validation_error(self):
        obs = np.full((20, 2, 3, 32, 32), 7, dtype=np.uint8)
        with pytest.raises(ValidationError):
            reachability_eval(_FakeModel(), _fake_traj(obs, obs), cross=False)

    def test_mean_reachability_records_degenerate_demos_as_none(self):
        good = (np.arange(20)[:, None, None, None, None]
                * np.ones((20, 2, 3, 32, 32)) * 10).astype(np.uint8)
        flat = np.full((20, 2, 3, 32, 32), 7, dtype=np.uint8)
        mean, rhos = mean_reachability(
            _FakeModel(),
            [_fake_traj(good, good), _fake_traj(flat, flat)],
            cross=False,
        )
        assert mean == 1.0 and rhos == [1.0, None]

    def test_embodiment_demos_rerender_cross_stream(self, small_dataset):
        demo = small_dataset.split("holdout")[0]
        variants = embodiment_demos([demo])
        assert [v.domain_kind_b for v in variants] == list(HELDOUT_EMBODIMENTS)
        for v in variants:
            assert v.obs_b.shape == demo.obs_b.shape
            assert v.obs_b.dtype == np.uint8
            assert not np.array_equal(v.obs_b, demo.obs_b)
            assert np.array_equal(v.obs_a, demo.obs_a)  # anchor stream kept
        again = embodiment_demos([demo])
        assert np.array_equal(variants[0].obs_b, again[0].obs_b)

    def test_embodiment_demos_empty_kinds_rejected(self, small_dataset):
        with pytest.raises(ContractError):
            embodiment_demos(small_dataset.split("holdout")[:1], kinds=())


class TestAlignmentAccuracy:
    def test_identical_streams_align_perfectly(self):
        obs = (np.arange(20)[:, None, None, None, None]
               * np.ones((20, 2, 3, 32, 32))).astype(np.uint8)
        traj = _fake_traj(obs, obs.copy())
        assert alignment_accuracy(_FakeModel(), traj, 0) == 1.0

    def test_shifted_streams_need_a_window(self):
        base = (np.arange(20)[:, None, None, None, None]
                * np.ones((20, 2, 3, 32, 32))).astype(np.uint8)
        shifted = np.roll(base, -2, axis=0)
        shifted[-2:] = 200  # keep the tail distinct
        traj = _fake_traj(base, shifted)
        assert alignment_accuracy(_FakeModel(), traj, 0) < 1.0
        assert alignment_accuracy(_FakeModel(), traj, 2) >= 0.9

    def test_negative_k_rejected(self):
        obs = np.zeros((4, 2, 3, 32, 32), dtype=np.uint8)
        with pytest.raises(ContractError):
            alignment_accuracy(_FakeModel(), _fake_traj(obs, obs), -1)
