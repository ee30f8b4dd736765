"""Convolution patch kernels: compiled (Cython) core with a numpy fallback.

The 3x3 convolutions dominate runtime.  They are computed as a patch
gather (im2col) followed by one BLAS matmul; the backward pass scatters
gradients back with col2im.  The gather/scatter loops are the only part
BLAS cannot do, so they exist twice: a Cython extension built at install
time and a pure-numpy stride-tricks version.  The compiled one is picked
at import when available; set MIRLAB_BACKEND=python to force the
fallback (MIRLAB_BACKEND=compiled raises if the extension is missing).

Layout: images are NHWC float64; a column row holds the 3x3 patch in
(kh, kw, channel) order.  Padding is always 1, so stride 1 preserves H,W
and stride 2 yields ceil(H/2) per side.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import as_strided

_requested = os.environ.get("MIRLAB_BACKEND", "auto")
_compiled = None
if _requested != "python":
    try:
        from . import _convkernels as _compiled
    except ImportError:
        if _requested == "compiled":
            raise
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def out_hw(h, w, stride):
    """Output spatial size for a padded 3x3 convolution."""
    return (h - 1) // stride + 1, (w - 1) // stride + 1


def _im2col_py(x, stride):
    n, h, w, c = x.shape
    ho, wo = out_hw(h, w, stride)
    xp = np.zeros((n, h + 2, w + 2, c), dtype=np.float64)
    xp[:, 1:-1, 1:-1, :] = x
    s = xp.strides
    view = as_strided(
        xp,
        shape=(n, ho, wo, 3, 3, c),
        strides=(s[0], s[1] * stride, s[2] * stride, s[1], s[2], s[3]),
    )
    return np.ascontiguousarray(view).reshape(n * ho * wo, 9 * c)


def _col2im_py(cols, shape, stride):
    n, h, w, c = shape
    ho, wo = out_hw(h, w, stride)
    v = cols.reshape(n, ho, wo, 3, 3, c)
    xp = np.zeros((n, h + 2, w + 2, c), dtype=np.float64)
    for ki in range(3):
        for kj in range(3):
            xp[:, ki:ki + ho * stride:stride, kj:kj + wo * stride:stride, :] += (
                v[:, :, :, ki, kj, :]
            )
    return xp[:, 1:-1, 1:-1, :]


def im2col(x, stride):
    """Gather 3x3 patches of NHWC ``x`` into a (N*Ho*Wo, 9*C) matrix."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _compiled is not None:
        n, h, w, c = x.shape
        ho, wo = out_hw(h, w, stride)
        cols = np.empty((n * ho * wo, 9 * c), dtype=np.float64)
        _compiled.im2col(x, cols, stride)
        return cols
    return _im2col_py(x, stride)


def col2im(cols, shape, stride):
    """Scatter-add patch gradients back to an NHWC image of ``shape``."""
    cols = np.ascontiguousarray(cols, dtype=np.float64)
    if _compiled is not None:
        out = np.zeros(shape, dtype=np.float64)
        _compiled.col2im(cols, out, stride)
        return out
    return _col2im_py(cols, shape, stride)
