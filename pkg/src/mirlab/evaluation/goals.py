"""Goal sequences sampled from demonstrations and the thresholded reward.

A demonstration is distilled into sparsely sampled goal embeddings; the
tracking agent sees one goal at a time and earns reward 1 exactly when
exp(-w * d^2) exceeds the threshold, where d is the embedding distance
to the active goal and w normalizes by the demo's own frame-to-frame
embedding motion.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..errors import ContractError

log = logging.getLogger(__name__)

DEFAULT_STRIDE = 8
DEFAULT_EPSILON = 0.3


@dataclass
class GoalSequence:
    goal_embeddings: np.ndarray  # (M, embed_dim)
    source_frames: List[int]
    w: float
    epsilon: float
    active_index: int = 0

    def __post_init__(self):
        frames = self.source_frames
        if any(b <= a for a, b in zip(frames, frames[1:])):
            raise ContractError("goal source frames must be strictly increasing")
        if len(frames) != len(self.goal_embeddings):
            raise ContractError("one source frame per goal embedding required")
        if self.w <= 0:
            raise ContractError(
                "goal normalization w must be > 0 (constant demo embeddings "
                "make the reward degenerate)"
            )
        if not 0.0 < self.epsilon < 1.0:
            raise ContractError("reward threshold must lie in (0, 1)")

    @property
    def n_goals(self) -> int:
        return len(self.source_frames)

    @property
    def done(self) -> bool:
        return self.active_index >= self.n_goals

    def advance(self, obs_embedding: np.ndarray) -> int:
        """Advance past every consecutively satisfied goal; returns the
        number of goals newly reached.  Never moves backward."""
        reached = 0
        while not self.done and reward(
            obs_embedding, self.goal_embeddings[self.active_index], self.w, self.epsilon
        ):
            self.active_index += 1
            reached += 1
        return reached


def compute_w(demo_embeddings) -> float:
    """Mean Euclidean distance between neighboring demo embeddings."""
    e = np.asarray(demo_embeddings, dtype=np.float64)
    if e.ndim != 2 or e.shape[0] < 2:
        raise ContractError("compute_w needs at least two embedded frames")
    return float(np.mean(np.linalg.norm(np.diff(e, axis=0), axis=1)))


def reward(o_embedding, goal_embedding, w: float, epsilon: float) -> int:
    """1 iff exp(-w * ||phi(o) - goal||^2) > epsilon, else 0."""
    if w <= 0:
        raise ContractError("reward normalization w must be > 0")
    d2 = float(np.sum((np.asarray(o_embedding) - np.asarray(goal_embedding)) ** 2))
    return int(math.exp(-w * d2) > epsilon)


def sample_goals(demo_embeddings, stride: int = DEFAULT_STRIDE,
                 epsilon: float = DEFAULT_EPSILON) -> GoalSequence:
    """Goals at frames stride, 2*stride, ... plus the final frame."""
    e = np.asarray(demo_embeddings, dtype=np.float64)
    t = e.shape[0]
    if t <= stride:
        raise ContractError(f"demo of {t} frames is shorter than stride {stride}")
    if not 5 <= stride <= 10:
        log.warning("goal stride %d outside the recommended [5, 10] band", stride)
    frames = list(range(stride, t, stride))
    if frames[-1] != t - 1:
        frames.append(t - 1)
    return GoalSequence(
        goal_embeddings=e[frames],
        source_frames=frames,
        w=compute_w(e),
        epsilon=epsilon,
    )
