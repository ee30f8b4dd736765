"""Tensor arithmetic with reverse-mode autodiff and the Adam optimizer."""

from .backend import BACKEND
from .optim import OptimizerState, adam_step
from .tensor import (
    Tensor,
    add,
    as_tensor,
    backward,
    concat,
    conv2d,
    gather_rows,
    grad_enabled,
    linear,
    matmul,
    mse,
    mul,
    no_grad,
    relu,
    reshape,
    scale,
    softmax_xent_soft,
    sub,
    transpose,
    tsum,
)

__all__ = [
    "BACKEND",
    "OptimizerState",
    "Tensor",
    "adam_step",
    "add",
    "as_tensor",
    "backward",
    "concat",
    "conv2d",
    "gather_rows",
    "grad_enabled",
    "linear",
    "matmul",
    "mse",
    "mul",
    "no_grad",
    "relu",
    "reshape",
    "scale",
    "softmax_xent_soft",
    "sub",
    "transpose",
    "tsum",
]
