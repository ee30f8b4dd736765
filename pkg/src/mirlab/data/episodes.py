"""Paired multi-domain trajectory generation.

One scripted-policy rollout produces a single physical trajectory; both
domains of the pairing then render every frame, so the two observation
streams are time-aligned by construction.  The canonical render is never
stored.  Pairings follow the two-environment-pair scheme: the
domain-randomized stream is always paired with either the invisible-arm
or the arm-randomized stream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from .. import sim
from ..errors import ContractError

log = logging.getLogger(__name__)

PAIRINGS = {
    "dr_invisible": "invisible_arm",
    "dr_arm": "arm_randomized",
}

HOLDOUT_EVERY = 4  # every 4th trajectory held out -> 75/25 split


@dataclass
class PairedTrajectory:
    """One physical trajectory rendered in two domains, with actions."""

    task_id: str
    seed: int
    pairing: str
    domain_kind_a: str
    domain_kind_b: str
    split: str
    actions: np.ndarray  # (T, 3) float64
    obs_a: np.ndarray  # (T, 2, 3, 32, 32) uint8
    obs_b: np.ndarray

    @property
    def length(self) -> int:
        return self.actions.shape[0]

    def meta(self) -> Dict:
        return {
            "task_id": self.task_id,
            "seed": self.seed,
            "pairing": self.pairing,
            "domain_kind_a": self.domain_kind_a,
            "domain_kind_b": self.domain_kind_b,
            "split": self.split,
            "actions_shape": list(self.actions.shape),
            "obs_shape": list(self.obs_a.shape),
        }


@dataclass
class Dataset:
    trajectories: List[PairedTrajectory]
    manifest: Dict

    def split(self, name: str) -> List[PairedTrajectory]:
        return [t for t in self.trajectories if t.split == name]


def _task_by_id(task_id: str) -> sim.TaskSpec:
    for t in sim.ALL_TASKS:
        if t.task_id == task_id:
            return t
    raise ContractError(f"unknown task_id '{task_id}'")


def quantize(img: np.ndarray) -> np.ndarray:
    return (np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def dequantize(img: np.ndarray) -> np.ndarray:
    return img.astype(np.float64) / 255.0


def rollout_states(task: sim.TaskSpec, seed: int, length: int = sim.EPISODE_LEN):
    """Scripted rollout; returns per-frame states and actions."""
    states, actions = [], []
    s = sim.reset(task, seed)
    for _ in range(length):
        a = sim.scripted_policy(s, task)
        states.append(s)
        actions.append(a.clamped().as_array())
        s = sim.step(s, a)
    return states, np.array(actions), s


def generate_paired_episode(
    task: sim.TaskSpec, seed: int, pairing: str, split: str = "train"
) -> Optional[PairedTrajectory]:
    """Roll out one episode and render it under both pairing domains.

    Returns None (and logs) when the scripted policy fails to stack
    within the episode budget; such episodes are discarded.
    """
    if pairing not in PAIRINGS:
        raise ContractError(f"unknown pairing '{pairing}' (expected {sorted(PAIRINGS)})")
    states, actions, final = rollout_states(task, seed)
    if not sim.success_predicates(final, task)["stacked"]:
        log.warning("discarding episode task=%s seed=%d: demonstrator timed out",
                    task.task_id, seed)
        return None

    # actions live as float32 in the file; round once here so a
    # save/load round-trip is exactly the identity
    actions = actions.astype(np.float32).astype(np.float64)
    dom_a = sim.sample_domain_spec("domain_randomized", seed)
    dom_b = sim.sample_domain_spec(PAIRINGS[pairing], seed)
    obs_a = np.stack([quantize(sim.render_obs(s, dom_a, seed, t))
                      for t, s in enumerate(states)])
    obs_b = np.stack([quantize(sim.render_obs(s, dom_b, seed, t))
                      for t, s in enumerate(states)])
    return PairedTrajectory(
        task_id=task.task_id,
        seed=seed,
        pairing=pairing,
        domain_kind_a="domain_randomized",
        domain_kind_b=PAIRINGS[pairing],
        split=split,
        actions=actions,
        obs_a=obs_a,
        obs_b=obs_b,
    )


def regenerate_episode(meta: Dict) -> PairedTrajectory:
    """Rebuild a trajectory bit-identically from its manifest record."""
    ep = generate_paired_episode(
        _task_by_id(meta["task_id"]), meta["seed"], meta["pairing"], meta["split"]
    )
    if ep is None:
        raise ContractError(
            f"manifest episode seed={meta['seed']} no longer regenerates"
        )
    return ep


def build_dataset(n_episodes_per_pairing: int = 64, seed: int = 0) -> Dataset:
    """Seeded dataset: n episodes per pairing, tasks round-robin, 75/25 split."""
    if n_episodes_per_pairing < 2:
        raise ContractError("need at least 2 episodes per pairing")
    trajectories: List[PairedTrajectory] = []
    discarded: List[int] = []
    counter = 0
    base = seed * 1_000_003 + 11
    for pairing in sorted(PAIRINGS):
        produced = 0
        while produced < n_episodes_per_pairing:
            ep_seed = base + counter
            counter += 1
            task = sim.ALL_TASKS[produced % len(sim.ALL_TASKS)]
            split = "holdout" if len(trajectories) % HOLDOUT_EVERY == HOLDOUT_EVERY - 1 else "train"
            ep = generate_paired_episode(task, ep_seed, pairing, split)
            if ep is None:
                discarded.append(ep_seed)
                continue
            trajectories.append(ep)
            produced += 1
    manifest = {
        "format": "mird",
        "version": 1,
        "n_episodes_per_pairing": n_episodes_per_pairing,
        "seed": seed,
        "holdout_every": HOLDOUT_EVERY,
        "discarded_seeds": discarded,
        "episodes": [t.meta() for t in trajectories],
    }
    return Dataset(trajectories=trajectories, manifest=manifest)
