"""Dense float64 tensors with reverse-mode automatic differentiation.

A forward pass builds a throwaway graph of ``Tensor`` nodes; calling
:func:`backward` on a scalar loss runs one reverse sweep and fills the
``grad`` buffer of every node that requires gradients.  The graph is
dropped with the Python references afterwards, so each training step
starts from a clean tape.  Everything is float64 and deterministic.
"""

from __future__ import annotations

import contextlib
from typing import Optional, Sequence

import numpy as np

from ..errors import ContractError, ShapeError, ValidationError
from . import backend

_grad_enabled = [True]


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (pure inference)."""
    _grad_enabled.append(False)
    try:
        yield
    finally:
        _grad_enabled.pop()


def grad_enabled() -> bool:
    return _grad_enabled[-1]


class Tensor:
    """A numpy float64 array plus an optional gradient buffer.

    Leaf tensors created with ``requires_grad=True`` are parameters;
    interior nodes are produced by the ops below and carry the closures
    needed for the reverse sweep.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, g: np.ndarray):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # Convenience arithmetic used by the losses and tests.
    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return scale(self, other) if np.isscalar(other) else mul(self, other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data, parents, backward_fn) -> Tensor:
    out = Tensor(data)
    track = grad_enabled() and any(p.requires_grad for p in parents)
    if track:
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    """Sum ``g`` down to ``shape`` (inverse of numpy broadcasting)."""
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# elementwise and structural ops


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    try:
        data = a.data + b.data
    except ValueError:
        raise ShapeError(f"add: incompatible shapes {a.shape} and {b.shape}")

    def bwd(out):
        g = out.grad
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.shape))

    return _node(data, (a, b), bwd)


def sub(a, b) -> Tensor:
    return add(a, scale(as_tensor(b), -1.0))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    try:
        data = a.data * b.data
    except ValueError:
        raise ShapeError(f"mul: incompatible shapes {a.shape} and {b.shape}")

    def bwd(out):
        g = out.grad
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.shape))

    return _node(data, (a, b), bwd)


def scale(a, s: float) -> Tensor:
    a = as_tensor(a)
    s = float(s)

    def bwd(out):
        if a.requires_grad:
            a._accumulate(out.grad * s)

    return _node(a.data * s, (a,), bwd)


def relu(a) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0

    def bwd(out):
        if a.requires_grad:
            a._accumulate(out.grad * mask)

    return _node(np.where(mask, a.data, 0.0), (a,), bwd)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        shapes = [t.shape for t in tensors]
        raise ShapeError(f"concat: incompatible shapes {shapes}")
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bwd(out):
        g = np.moveaxis(out.grad, axis, 0)
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                t._accumulate(np.moveaxis(g[lo:hi], 0, axis))

    return _node(data, tensors, bwd)


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)

    def bwd(out):
        if a.requires_grad:
            a._accumulate(out.grad.reshape(a.shape))

    return _node(a.data.reshape(shape), (a,), bwd)


def transpose(a, axes) -> Tensor:
    a = as_tensor(a)
    inv = np.argsort(axes)

    def bwd(out):
        if a.requires_grad:
            a._accumulate(np.ascontiguousarray(out.grad.transpose(inv)))

    return _node(np.ascontiguousarray(a.data.transpose(axes)), (a,), bwd)


def gather_rows(a, idx) -> Tensor:
    """Select rows of a 2-D tensor; gradients scatter-add back."""
    a = as_tensor(a)
    idx = np.asarray(idx, dtype=np.intp)
    if a.data.ndim != 2:
        raise ContractError("gather_rows expects a 2-D tensor")

    def bwd(out):
        if a.requires_grad:
            g = np.zeros_like(a.data)
            np.add.at(g, idx, out.grad)
            a._accumulate(g)

    return _node(a.data[idx], (a,), bwd)


def tsum(a) -> Tensor:
    """Sum all elements to a scalar tensor."""
    a = as_tensor(a)

    def bwd(out):
        if a.requires_grad:
            a._accumulate(np.full(a.shape, out.grad))

    return _node(a.data.sum(), (a,), bwd)


# ---------------------------------------------------------------------------
# linear algebra


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    data = a.data @ b.data

    def bwd(out):
        g = out.grad
        if a.requires_grad:
            a._accumulate(g @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ g)

    return _node(data, (a, b), bwd)


def linear(x, w, b) -> Tensor:
    """x @ w + b with a broadcast bias row."""
    return add(matmul(x, w), b)


def conv2d(x, kernel, bias=None, stride: int = 1) -> Tensor:
    """Padded 3x3 cross-correlation on NHWC input.

    ``x`` is (N, H, W, C_in), ``kernel`` is (C_out, C_in, 3, 3), ``bias``
    is (C_out,).  Stride 1 keeps H,W; stride 2 halves them (rounding up).
    Single images shaped (C, H, W) are accepted and returned as
    (C_out, Ho, Wo) for convenience.
    """
    x, kernel = as_tensor(x), as_tensor(kernel)
    if stride not in (1, 2):
        raise ContractError(f"conv2d: stride must be 1 or 2, got {stride}")
    if kernel.data.ndim != 4 or kernel.shape[2:] != (3, 3):
        raise ShapeError(f"conv2d: kernel must be (C_out, C_in, 3, 3), got {kernel.shape}")

    chw = x.data.ndim == 3
    if chw:
        x4 = transpose(reshape(x, (1,) + x.shape), (0, 2, 3, 1))
    else:
        x4 = x
    n, h, w, c_in = x4.shape
    if h < 3 or w < 3:
        raise ContractError(f"conv2d: spatial size {h}x{w} below 3x3")
    c_out = kernel.shape[0]
    if kernel.shape[1] != c_in:
        raise ShapeError(
            f"conv2d: input has {c_in} channels but kernel expects "
            f"{kernel.shape[1]} (input {x.shape}, kernel {kernel.shape})"
        )

    cols = backend.im2col(x4.data, stride)
    wmat = np.ascontiguousarray(kernel.data.transpose(2, 3, 1, 0)).reshape(9 * c_in, c_out)
    out2d = cols @ wmat
    ho, wo = backend.out_hw(h, w, stride)
    if bias is not None:
        bias = as_tensor(bias)
        out2d += bias.data

    def bwd(out):
        g2d = out.grad.reshape(n * ho * wo, c_out)
        if kernel.requires_grad:
            dw = (cols.T @ g2d).reshape(3, 3, c_in, c_out).transpose(3, 2, 0, 1)
            kernel._accumulate(np.ascontiguousarray(dw))
        if bias is not None and bias.requires_grad:
            bias._accumulate(g2d.sum(axis=0))
        if x4.requires_grad:
            dcols = g2d @ wmat.T
            x4._accumulate(backend.col2im(dcols, (n, h, w, c_in), stride))

    parents = (x4, kernel) if bias is None else (x4, kernel, bias)
    out = _node(out2d.reshape(n, ho, wo, c_out), parents, bwd)
    if chw:
        out = reshape(transpose(out, (0, 3, 1, 2)), (c_out, ho, wo))
    return out


# ---------------------------------------------------------------------------
# losses


def softmax_xent_soft(logits, targets) -> Tensor:
    """Cross-entropy of row softmaxes against soft target rows.

    Returns sum_i sum_k -targets[i,k] * log softmax(logits[i,:])[k],
    stabilized by per-row max subtraction.  Each target row must sum to
    1 within 1e-9.
    """
    logits = as_tensor(logits)
    t = np.asarray(targets.data if isinstance(targets, Tensor) else targets, dtype=np.float64)
    if logits.data.ndim != 2 or t.shape != logits.shape:
        raise ShapeError(
            f"softmax_xent_soft: logits {logits.shape} vs targets {t.shape}"
        )
    rowsums = t.sum(axis=1)
    bad = np.abs(rowsums - 1.0) > 1e-9
    if bad.any():
        i = int(np.argmax(bad))
        raise ValidationError(
            f"softmax_xent_soft: target row {i} sums to {rowsums[i]!r}, not 1"
        )
    z = logits.data - logits.data.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = z - lse
    loss = -(t * logp).sum()

    def bwd(out):
        if logits.requires_grad:
            softmax = np.exp(logp)
            logits._accumulate(out.grad * (softmax - t))

    return _node(loss, (logits,), bwd)


def mse(pred, target) -> Tensor:
    """Summed squared error (the ||.||^2 form, not a mean)."""
    pred, target = as_tensor(pred), as_tensor(target)
    if pred.shape != target.shape:
        raise ShapeError(f"mse: shapes differ, {pred.shape} vs {target.shape}")
    diff = pred.data - target.data

    def bwd(out):
        if pred.requires_grad:
            pred._accumulate(out.grad * 2.0 * diff)
        if target.requires_grad:
            target._accumulate(out.grad * -2.0 * diff)

    return _node((diff * diff).sum(), (pred, target), bwd)


# ---------------------------------------------------------------------------
# reverse sweep


def backward(loss: Tensor):
    """Run the reverse-mode sweep from a scalar loss.

    Gradients accumulate into ``grad``; call ``zero_grad`` on parameters
    between steps.  Repeated calls without reset keep accumulating.
    """
    if loss.data.ndim != 0 and loss.data.size != 1:
        raise ContractError(f"backward: loss must be scalar, got shape {loss.shape}")
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen or not node.requires_grad:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            stack.append((p, False))

    loss._accumulate(np.ones_like(loss.data))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node)
    # interior nodes are transient; free their buffers eagerly
    for node in order:
        if node._backward is not None:
            node.grad = None
