"""Evaluation protocols: rank-correlation analysis and goal tracking."""

from .goals import (
    DEFAULT_EPSILON,
    DEFAULT_STRIDE,
    GoalSequence,
    compute_w,
    reward,
    sample_goals,
)
from .imitate import (
    CSV_HEADER,
    EVAL_DOMAINS,
    EvalReport,
    build_goal_sequence,
    imitation_eval,
    jitter_start,
)
from .metrics import alignment_accuracy, average_ranks, spearman
from .reachability import (
    HELDOUT_EMBODIMENTS,
    embodiment_demos,
    mean_reachability,
    reachability_curve,
    reachability_eval,
)
from .tracking import (
    TrackResult,
    embed_states,
    track_cem,
    track_gcp,
)

__all__ = [
    "CSV_HEADER",
    "DEFAULT_EPSILON",
    "DEFAULT_STRIDE",
    "EVAL_DOMAINS",
    "EvalReport",
    "GoalSequence",
    "TrackResult",
    "alignment_accuracy",
    "average_ranks",
    "build_goal_sequence",
    "compute_w",
    "embed_states",
    "imitation_eval",
    "jitter_start",
    "HELDOUT_EMBODIMENTS",
    "embodiment_demos",
    "mean_reachability",
    "reachability_curve",
    "reachability_eval",
    "reward",
    "sample_goals",
    "spearman",
    "track_cem",
    "track_gcp",
]
