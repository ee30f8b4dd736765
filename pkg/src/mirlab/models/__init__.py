"""Encoders, objectives, training loop, and checkpoints."""

from .checkpoint import load_model, save_model
from .encoder import (
    CMC_CLASSES,
    DEFAULT_CONFIG,
    TDC_CLASSES,
    EncoderConfig,
    Model,
    encode,
)
from .losses import (
    cmc_class,
    loss_distance_classification,
    loss_goal_conditioned,
    loss_tcn,
    loss_tscn,
    smoothing_distribution,
    tdc_class,
)
from .train import (
    METHODS,
    METRIC_FIELDS,
    TrainConfig,
    TrainResult,
    holdout_loss,
    train,
    write_metrics_csv,
)

__all__ = [
    "CMC_CLASSES",
    "DEFAULT_CONFIG",
    "EncoderConfig",
    "METHODS",
    "METRIC_FIELDS",
    "Model",
    "TDC_CLASSES",
    "TrainConfig",
    "TrainResult",
    "cmc_class",
    "encode",
    "holdout_loss",
    "load_model",
    "loss_distance_classification",
    "loss_goal_conditioned",
    "loss_tcn",
    "loss_tscn",
    "save_model",
    "smoothing_distribution",
    "tdc_class",
    "train",
    "write_metrics_csv",
]
