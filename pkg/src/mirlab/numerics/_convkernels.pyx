# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled im2col/col2im for padded 3x3 convolutions on NHWC float64."""

import numpy as np
cimport numpy as cnp


def im2col(cnp.float64_t[:, :, :, ::1] x, cnp.float64_t[:, ::1] cols, int stride):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], w = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t ho = (h - 1) // stride + 1
    cdef Py_ssize_t wo = (w - 1) // stride + 1
    cdef Py_ssize_t b, i, j, ki, kj, ch, row, col0, ii, jj
    with nogil:
        for b in range(n):
            for i in range(ho):
                for j in range(wo):
                    row = (b * ho + i) * wo + j
                    for ki in range(3):
                        ii = i * stride + ki - 1
                        col0 = ki * 3
                        if ii < 0 or ii >= h:
                            for kj in range(3):
                                for ch in range(c):
                                    cols[row, (col0 + kj) * c + ch] = 0.0
                            continue
                        for kj in range(3):
                            jj = j * stride + kj - 1
                            if jj < 0 or jj >= w:
                                for ch in range(c):
                                    cols[row, (col0 + kj) * c + ch] = 0.0
                            else:
                                for ch in range(c):
                                    cols[row, (col0 + kj) * c + ch] = x[b, ii, jj, ch]


def col2im(cnp.float64_t[:, ::1] cols, cnp.float64_t[:, :, :, ::1] out, int stride):
    cdef Py_ssize_t n = out.shape[0], h = out.shape[1], w = out.shape[2], c = out.shape[3]
    cdef Py_ssize_t ho = (h - 1) // stride + 1
    cdef Py_ssize_t wo = (w - 1) // stride + 1
    cdef Py_ssize_t b, i, j, ki, kj, ch, row, col0, ii, jj
    with nogil:
        for b in range(n):
            for i in range(ho):
                for j in range(wo):
                    row = (b * ho + i) * wo + j
                    for ki in range(3):
                        ii = i * stride + ki - 1
                        if ii < 0 or ii >= h:
                            continue
                        col0 = ki * 3
                        for kj in range(3):
                            jj = j * stride + kj - 1
                            if jj < 0 or jj >= w:
                                continue
                            for ch in range(c):
                                out[b, ii, jj, ch] += cols[row, (col0 + kj) * c + ch]
