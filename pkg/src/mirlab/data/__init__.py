"""Paired trajectory datasets: generation, MIRD persistence, batching."""

from .batches import GCP_HORIZON, Batch, sample_batch
from .episodes import (
    HOLDOUT_EVERY,
    PAIRINGS,
    Dataset,
    PairedTrajectory,
    build_dataset,
    dequantize,
    generate_paired_episode,
    quantize,
    regenerate_episode,
    rollout_states,
)
from .store import load, save

__all__ = [
    "Batch",
    "Dataset",
    "GCP_HORIZON",
    "HOLDOUT_EVERY",
    "PAIRINGS",
    "PairedTrajectory",
    "build_dataset",
    "dequantize",
    "generate_paired_episode",
    "load",
    "quantize",
    "regenerate_episode",
    "rollout_states",
    "sample_batch",
    "save",
]
