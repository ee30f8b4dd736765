"""Mini-batch sampling over paired trajectory datasets.

A batch is B independent (sequence, start-offset) draws; each sequence
contributes an aligned window of ``window`` frame pairs.  Frames from
the other B-1 sequences serve as extra contrastive negatives.  For
goal-conditioned training each sequence also carries (anchor, goal)
index pairs: the goal offset j is uniform in [1, gcp_horizon] and the
goal frame stays inside the sampled window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from ..errors import ContractError
from .episodes import Dataset, PairedTrajectory, dequantize

GCP_HORIZON = 20  # the goal-offset horizon used throughout


@dataclass
class Batch:
    """Dequantized aligned windows from B sequences."""

    obs_a: np.ndarray  # (B, n, 2, 3, 32, 32) float64
    obs_b: np.ndarray
    actions: np.ndarray  # (B, n, 3)
    seq_indices: List[int]
    offsets: List[int]
    gcp_pairs: np.ndarray  # (B, K, 2) anchor/goal positions within the window

    @property
    def n_sequences(self) -> int:
        return self.obs_a.shape[0]

    @property
    def window(self) -> int:
        return self.obs_a.shape[1]


def sample_batch(
    dataset: Dataset,
    batch_size: int,
    window: int,
    rng: np.random.Generator,
    split: str = "train",
    gcp_horizon: int = GCP_HORIZON,
    gcp_pairs_per_seq: int = 8,
) -> Batch:
    """Draw one batch; deterministic given the generator state."""
    trajs = dataset.split(split)
    if not trajs:
        raise ContractError(f"dataset has no '{split}' trajectories")
    if batch_size < 1:
        raise ContractError("batch_size must be >= 1")
    length = trajs[0].length
    if window > length:
        raise ContractError(f"window {window} exceeds trajectory length {length}")

    seq_idx = rng.integers(0, len(trajs), size=batch_size)
    offsets = rng.integers(0, length - window + 1, size=batch_size)
    obs_a, obs_b, actions, pairs = [], [], [], []
    for s, off in zip(seq_idx, offsets):
        t: PairedTrajectory = trajs[s]
        sl = slice(off, off + window)
        obs_a.append(dequantize(t.obs_a[sl]))
        obs_b.append(dequantize(t.obs_b[sl]))
        actions.append(t.actions[sl])
        js = rng.integers(1, min(gcp_horizon, window - 1) + 1, size=gcp_pairs_per_seq)
        anchors = np.array([rng.integers(0, window - j) for j in js])
        pairs.append(np.stack([anchors, anchors + js], axis=1))
    return Batch(
        obs_a=np.stack(obs_a),
        obs_b=np.stack(obs_b),
        actions=np.stack(actions),
        seq_indices=[int(i) for i in seq_idx],
        offsets=[int(o) for o in offsets],
        gcp_pairs=np.stack(pairs),
    )
