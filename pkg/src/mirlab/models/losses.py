"""Training objectives: contrastive alignment, goal-conditioned policy
regression, and temporal-distance classification baselines.

All objectives consume embedding tensors produced by the shared encoder
and return scalar loss tensors on the active tape.  Similarities are raw
dot products (no normalization, no temperature).
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..errors import ContractError
from ..numerics import Tensor, concat, matmul, mse, softmax_xent_soft, transpose


def smoothing_distribution(n: int) -> np.ndarray:
    """Row-stochastic temporal smoothing targets p[i,k] ~ exp(-|i-k|)."""
    if n < 1:
        raise ContractError("smoothing_distribution needs n >= 1")
    idx = np.arange(n)
    logits = -np.abs(idx[:, None] - idx[None, :]).astype(np.float64)
    w = np.exp(logits)
    return w / w.sum(axis=1, keepdims=True)


def _pair_logits(x: Tensor, x_aligned: Tensor, extras: Optional[Tensor]) -> Tensor:
    if x.shape != x_aligned.shape:
        raise ContractError(
            f"aligned embedding blocks differ in shape: {x.shape} vs {x_aligned.shape}"
        )
    keys = x_aligned if extras is None else concat([x_aligned, extras], axis=0)
    return matmul(x, transpose(keys, (1, 0)))


def loss_tcn(x: Tensor, x_aligned: Tensor, extras: Optional[Tensor] = None) -> Tensor:
    """n-pairs contrastive loss: each row must pick its aligned partner
    among the window plus any extra cross-sequence negatives."""
    n = x.shape[0]
    logits = _pair_logits(x, x_aligned, extras)
    targets = np.zeros(logits.shape)
    targets[np.arange(n), np.arange(n)] = 1.0
    return softmax_xent_soft(logits, targets)


def loss_tscn(x: Tensor, x_aligned: Tensor, extras: Optional[Tensor] = None) -> Tensor:
    """Temporally-smooth variant: soft targets over the aligned window,
    zero mass on the extra negatives (they only feed the denominator)."""
    n = x.shape[0]
    logits = _pair_logits(x, x_aligned, extras)
    targets = np.zeros(logits.shape)
    targets[:, :n] = smoothing_distribution(n)
    return softmax_xent_soft(logits, targets)


def loss_goal_conditioned(pred_actions: Tensor, target_actions) -> Tensor:
    """Summed squared action-prediction error over (anchor, goal) pairs."""
    return mse(pred_actions, Tensor(np.asarray(target_actions, dtype=np.float64)))


# -- temporal distance classification ---------------------------------------

# interval categories {1}, {2}, {3,4}, {5,..,20}, {21,..,T-1}
_TDC_EDGES = (1, 2, 4, 20)


def tdc_class(d: int, episode_len: int) -> int:
    if d < 1:
        raise ContractError("TDC distance must be >= 1 (zero excluded)")
    if d >= episode_len:
        raise ContractError(f"distance {d} outside episode of length {episode_len}")
    for c, edge in enumerate(_TDC_EDGES):
        if d <= edge:
            return c
    return len(_TDC_EDGES)


def cmc_class(d: int, episode_len: int) -> int:
    """CMC prepends a {0} bin to the TDC categories."""
    if d < 0:
        raise ContractError("CMC distance must be >= 0")
    if d == 0:
        return 0
    return 1 + tdc_class(d, episode_len)


def loss_distance_classification(logits: Tensor, classes: Sequence[int],
                                 n_classes: int) -> Tensor:
    classes = np.asarray(classes, dtype=np.intp)
    if logits.shape != (len(classes), n_classes):
        raise ContractError(
            f"distance-classification logits {logits.shape} vs "
            f"{len(classes)} labels, {n_classes} classes"
        )
    targets = np.zeros((len(classes), n_classes))
    targets[np.arange(len(classes)), classes] = 1.0
    return softmax_xent_soft(logits, targets)
