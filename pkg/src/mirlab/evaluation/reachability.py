"""Reachability rank-correlation analysis.

For a monotone stacking demonstration the minimum time needed to reach
frame t from frame 0 grows linearly in t, so a good embedding should
place frames at distances from the start whose ranks correlate with the
frame index.  We measure the Spearman correlation between the (min-max
normalized) embedding distance from frame 0 and the linear frame ramp,
either within one domain or across the paired domain.
"""

from __future__ import annotations

from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .. import sim
from ..data import PairedTrajectory, dequantize, quantize, rollout_states
from ..errors import ContractError, ValidationError
from .metrics import spearman

MIN_DEMO_LEN = 10

# Embodiments absent from the training pairings.  The cross-domain
# reachability protocol measures generalization to a manipulator never
# seen during representation learning, so the cross stream is re-rendered
# in these rather than taken from the stored (training-distribution) pair.
HELDOUT_EMBODIMENTS = ("stick", "blob_hand")


def embodiment_demos(
    demos: Sequence[PairedTrajectory],
    kinds: Sequence[str] = HELDOUT_EMBODIMENTS,
) -> List[PairedTrajectory]:
    """Copies of ``demos`` whose paired stream is re-rendered in each of
    the held-out embodiment domains (one copy per demo and kind)."""
    if not kinds:
        raise ContractError("embodiment_demos needs at least one domain kind")
    out = []
    for traj in demos:
        task = next((t for t in sim.ALL_TASKS if t.task_id == traj.task_id), None)
        if task is None:
            raise ContractError(f"unknown task_id '{traj.task_id}'")
        states, _, _ = rollout_states(task, traj.seed)
        for kind in kinds:
            spec = sim.sample_domain_spec(kind, traj.seed)
            obs = np.stack(
                [sim.render_batch(states, spec, v) for v in (0, 1)], axis=1
            )
            out.append(
                replace(
                    traj,
                    pairing=f"dr_{kind}",
                    domain_kind_b=kind,
                    obs_b=quantize(obs),
                )
            )
    return out


def _distance_curve(model, traj: PairedTrajectory, cross: bool) -> np.ndarray:
    """Min-max normalized d_t = ||phi(o_0) - phi(o-bar_t)||."""
    if traj.length < MIN_DEMO_LEN:
        raise ContractError(f"demo of {traj.length} frames is too short")
    anchor = model.embed_array(dequantize(traj.obs_a[:1]))[0]
    targets = model.embed_array(dequantize(traj.obs_b if cross else traj.obs_a))
    d = np.linalg.norm(targets - anchor, axis=1)
    lo, hi = d.min(), d.max()
    if hi <= lo:
        raise ValidationError("constant embedding distances; reachability undefined")
    return (d - lo) / (hi - lo)


def reachability_curve(model, traj: PairedTrajectory, cross: bool) -> np.ndarray:
    return _distance_curve(model, traj, cross)


def reachability_eval(model, traj: PairedTrajectory, cross: bool) -> float:
    """Spearman correlation of the distance curve against the frame ramp."""
    d = _distance_curve(model, traj, cross)
    return spearman(d, np.arange(traj.length, dtype=np.float64))


def mean_reachability(model, trajs, cross: bool) -> Tuple[float, List[Optional[float]]]:
    """Mean rho over demos; degenerate demos are recorded as None and
    excluded from the mean."""
    if not trajs:
        raise ContractError("mean_reachability needs at least one demo")
    rhos: List[Optional[float]] = []
    for traj in trajs:
        try:
            rhos.append(reachability_eval(model, traj, cross))
        except ValidationError:
            rhos.append(None)
    finite = [r for r in rhos if r is not None]
    if not finite:
        raise ValidationError("every demo had a degenerate embedding curve")
    return float(np.mean(finite)), rhos
