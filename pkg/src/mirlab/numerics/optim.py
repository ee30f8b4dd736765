"""Adaptive-moment (Adam) optimizer over named parameter dicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from ..errors import TrainingDivergedError
from .tensor import Tensor


@dataclass
class OptimizerState:
    """Per-parameter first/second moment buffers plus the step counter."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: Dict[str, Tensor], state: OptimizerState):
    """One bias-corrected Adam update, in place, using each param's .grad.

    Parameters with no gradient this step are treated as zero-gradient
    (their moments still decay).  NaN gradients abort with the parameter
    name.  Deterministic: identical state and grads give bit-identical
    results.
    """
    state.step_count += 1
    t = state.step_count
    lr, b1, b2, eps = state.learning_rate, state.beta1, state.beta2, state.epsilon
    bias1 = 1.0 - b1 ** t
    bias2 = 1.0 - b2 ** t
    for name, p in params.items():
        g = p.grad if p.grad is not None else np.zeros_like(p.data)
        if np.isnan(g).any():
            raise TrainingDivergedError(f"NaN gradient in parameter '{name}'")
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None:
            m = np.zeros_like(p.data)
            v = np.zeros_like(p.data)
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        state.first_moment[name] = m
        state.second_moment[name] = v
        p.data -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
