"""Rank correlation and cross-domain alignment metrics."""

from __future__ import annotations

import numpy as np

from ..data import PairedTrajectory, dequantize
from ..errors import ContractError, ValidationError


def average_ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the average of their rank span."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=np.float64)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(a, b) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks.

    Constant input makes the correlation undefined; that raises a
    ValidationError so callers must handle it explicitly (it is never
    reported as a silent NaN).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ContractError(
            f"spearman needs two equal-length 1-D lists of >= 2 values, "
            f"got shapes {a.shape} and {b.shape}"
        )
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise ValidationError("spearman undefined for a constant input list")
    ra, rb = average_ranks(a), average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    return float(np.dot(ra, rb) / np.sqrt(np.dot(ra, ra) * np.dot(rb, rb)))


def alignment_accuracy(model, traj: PairedTrajectory, k: int) -> float:
    """Fraction of frames whose nearest cross-domain neighbor (by embedding
    distance) is within k frames of the true temporal index."""
    if k < 0:
        raise ContractError("alignment window k must be >= 0")
    ea = model.embed_array(dequantize(traj.obs_a))
    eb = model.embed_array(dequantize(traj.obs_b))
    d2 = ((ea[:, None, :] - eb[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(d2, axis=1)
    t = np.arange(traj.length)
    return float(np.mean(np.abs(nearest - t) <= k))
