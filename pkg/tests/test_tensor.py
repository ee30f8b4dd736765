"""Autodiff correctness: finite differences, broadcasting, graph mechanics."""

import numpy as np
import pytest

from mirlab.errors import ContractError, ValidationError
from mirlab.numerics import (
    Tensor,
    add,
    backward,
    concat,
    conv2d,
    gather_rows,
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


def _t(rng, *shape):
    return Tensor(rng.standard_normal(shape), requires_grad=True)


class TestFiniteDifferences:
    def test_add_broadcast(self, fdcheck):
        rng = np.random.default_rng(1)
        a, b = _t(rng, 4, 5), _t(rng, 5)
        fdcheck(lambda a, b: tsum(mul(add(a, b), add(a, b))), [a, b])

    def test_sub_mul(self, fdcheck):
        rng = np.random.default_rng(2)
        a, b = _t(rng, 3, 4), _t(rng, 3, 4)
        fdcheck(lambda a, b: tsum(mul(sub(a, b), a)), [a, b])

    def test_scale_relu(self, fdcheck):
        rng = np.random.default_rng(3)
        a = _t(rng, 6, 6)
        fdcheck(lambda a: tsum(relu(scale(a, -1.7))), [a])

    def test_matmul(self, fdcheck):
        rng = np.random.default_rng(4)
        a, b = _t(rng, 4, 6), _t(rng, 6, 3)
        fdcheck(lambda a, b: tsum(mul(matmul(a, b), matmul(a, b))), [a, b])

    def test_linear(self, fdcheck):
        rng = np.random.default_rng(5)
        x, w, b = _t(rng, 5, 4), _t(rng, 4, 3), _t(rng, 3)
        fdcheck(lambda x, w, b: tsum(relu(linear(x, w, b))), [x, w, b])

    def test_concat_reshape_transpose(self, fdcheck):
        rng = np.random.default_rng(6)
        a, b = _t(rng, 3, 4), _t(rng, 3, 2)
        fdcheck(
            lambda a, b: tsum(
                mul(
                    reshape(concat([a, b], axis=1), (2, 9)),
                    transpose(reshape(concat([a, b], axis=1), (9, 2)), (1, 0)),
                )
            ),
            [a, b],
        )

    def test_gather_rows_repeated_indices(self, fdcheck):
        rng = np.random.default_rng(7)
        a = _t(rng, 5, 3)
        idx = np.array([0, 2, 2, 4, 0])
        fdcheck(lambda a: tsum(mul(gather_rows(a, idx), gather_rows(a, idx))), [a])

    @pytest.mark.parametrize("stride", [1, 2])
    def test_conv2d(self, fdcheck, stride):
        rng = np.random.default_rng(8 + stride)
        x = _t(rng, 2, 6, 6, 3)
        k = _t(rng, 4, 3, 3, 3)
        b = _t(rng, 4)
        fdcheck(
            lambda x, k, b: tsum(relu(conv2d(x, k, b, stride=stride))),
            [x, k, b],
            probes=10,
        )

    def test_softmax_xent_soft(self, fdcheck):
        rng = np.random.default_rng(10)
        logits = _t(rng, 4, 6)
        targets = rng.random((4, 6))
        targets /= targets.sum(axis=1, keepdims=True)
        fdcheck(lambda l: softmax_xent_soft(l, targets), [logits])

    def test_mse(self, fdcheck):
        rng = np.random.default_rng(11)
        pred = _t(rng, 5, 3)
        target = Tensor(rng.standard_normal((5, 3)))
        fdcheck(lambda p: mse(p, target), [pred])


class TestGraphMechanics:
    def test_backward_requires_scalar(self):
        a = Tensor(np.ones((2, 2)), requires_grad=True)
        with pytest.raises(ContractError):
            backward(add(a, a))

    def test_grad_accumulates_across_uses(self):
        a = Tensor(np.array([2.0]), requires_grad=True)
        backward(tsum(add(a, a)))
        assert a.grad[0] == 2.0

    def test_no_grad_builds_no_graph(self):
        a = Tensor(np.ones(3), requires_grad=True)
        with no_grad():
            out = tsum(mul(a, a))
        assert out._parents == ()
        backward(out)  # detached scalar: nothing upstream receives a grad
        assert a.grad is None

    def test_non_requires_grad_leaf_gets_no_grad(self):
        a = Tensor(np.ones(3), requires_grad=True)
        b = Tensor(np.ones(3))
        backward(tsum(mul(a, b)))
        assert b.grad is None
        assert np.allclose(a.grad, 1.0)

    def test_float64_everywhere(self):
        a = Tensor(np.ones(3, dtype=np.float32))
        assert a.data.dtype == np.float64

    def test_softmax_rejects_unnormalized_targets(self):
        logits = Tensor(np.zeros((2, 3)), requires_grad=True)
        with pytest.raises(ValidationError):
            softmax_xent_soft(logits, np.ones((2, 3)))

    def test_softmax_shift_invariance(self):
        rng = np.random.default_rng(0)
        logits = rng.standard_normal((3, 5))
        targets = np.full((3, 5), 0.2)
        a = softmax_xent_soft(Tensor(logits), targets).item()
        b = softmax_xent_soft(Tensor(logits + 1000.0), targets).item()
        assert abs(a - b) < 1e-8

    def test_conv2d_known_value(self):
        # all-ones 1-channel image, all-ones kernel: interior outputs are 9
        x = Tensor(np.ones((1, 4, 4, 1)))
        k = Tensor(np.ones((1, 1, 3, 3)))
        out = conv2d(x, k).data[0, :, :, 0]
        assert out[1, 1] == 9.0 and out[0, 0] == 4.0 and out[0, 1] == 6.0

    def test_mse_known_value(self):
        pred = Tensor(np.array([[1.0, 2.0]]), requires_grad=True)
        target = Tensor(np.array([[0.0, 0.0]]))
        loss = mse(pred, target)
        assert loss.item() == 5.0
        backward(loss)
        assert np.allclose(pred.grad, [[2.0, 4.0]])
