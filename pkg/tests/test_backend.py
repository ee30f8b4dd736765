"""Backend selection and im2col/col2im kernel parity."""

import numpy as np
import pytest

from mirlab.numerics import backend


def test_backend_reports_a_valid_choice():
    assert backend.BACKEND in ("python", "compiled")


def test_out_hw():
    assert backend.out_hw(32, 32, 1) == (32, 32)
    assert backend.out_hw(32, 32, 2) == (16, 16)
    assert backend.out_hw(5, 7, 2) == (3, 4)


@pytest.mark.parametrize("stride", [1, 2])
def test_im2col_matches_naive(stride):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((2, 6, 5, 3))
    cols = backend.im2col(x, stride)
    ho, wo = backend.out_hw(6, 5, stride)
    pad = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    naive = np.empty((2, ho, wo, 9 * 3))
    for i in range(ho):
        for j in range(wo):
            patch = pad[:, i * stride : i * stride + 3, j * stride : j * stride + 3, :]
            naive[:, i, j, :] = patch.reshape(2, -1)
    assert np.allclose(cols, naive.reshape(2 * ho * wo, 27))


@pytest.mark.parametrize("stride", [1, 2])
def test_col2im_adjoint_of_im2col(stride):
    """<im2col(x), c> == <x, col2im(c)> for random x, c (adjoint pair)."""
    rng = np.random.default_rng(1)
    x = rng.standard_normal((2, 6, 5, 3))
    cols = backend.im2col(x, stride)
    c = rng.standard_normal(cols.shape)
    lhs = float(np.sum(cols * c))
    rhs = float(np.sum(x * backend.col2im(c, x.shape, stride)))
    assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("stride", [1, 2])
def test_python_fallback_matches_dispatch(stride):
    rng = np.random.default_rng(2)
    x = rng.standard_normal((3, 8, 8, 4))
    assert np.array_equal(backend.im2col(x, stride), backend._im2col_py(x, stride))
    cols = backend.im2col(x, stride)
    g = rng.standard_normal(cols.shape)
    assert np.allclose(
        backend.col2im(g, x.shape, stride), backend._col2im_py(g, x.shape, stride)
    )
