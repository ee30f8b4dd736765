"""Visual domain specifications and their seeded samplers.

Four core kinds mirror the training environments (canonical, fully
domain-randomized, arm-only-randomized, invisible arm) plus two held-out
evaluation analogs with unseen manipulator sprites ("stick" and
"blob_hand").  Randomized kinds also perturb grasp radius and gravity
uniformly within +-10%.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .world import GRASP_RADIUS, GRAVITY, Dynamics

RGB = Tuple[float, float, float]

KINDS = (
    "canonical",
    "domain_randomized",
    "arm_randomized",
    "invisible_arm",
    "stick",
    "blob_hand",
)

CANONICAL_OBJECT_COLORS: Tuple[RGB, ...] = (
    (0.85, 0.20, 0.20),  # red
    (0.20, 0.80, 0.25),  # green
    (0.25, 0.40, 0.90),  # blue
)
CANONICAL_BACKGROUND: RGB = (0.13, 0.13, 0.16)
CANONICAL_ARM_COLOR: RGB = (0.92, 0.92, 0.90)
CANONICAL_ARM_RADIUS = 0.05


@dataclass(frozen=True)
class ArmSprite:
    radius: float
    color: RGB
    style: str = "disc"  # disc | stick | blob


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    palette: Tuple[RGB, RGB, RGB]  # object colors by color_id
    background_color: RGB
    noise_amplitude: float
    view_offsets: Tuple[Tuple[float, float], Tuple[float, float]]
    arm_visible: bool
    arm_sprite: ArmSprite
    dynamics: Dynamics


_ZERO_OFFSETS = ((0.0, 0.0), (0.0, 0.0))

CANONICAL_SPEC = DomainSpec(
    kind="canonical",
    palette=CANONICAL_OBJECT_COLORS,
    background_color=CANONICAL_BACKGROUND,
    noise_amplitude=0.0,
    view_offsets=_ZERO_OFFSETS,
    arm_visible=True,
    arm_sprite=ArmSprite(CANONICAL_ARM_RADIUS, CANONICAL_ARM_COLOR),
    dynamics=Dynamics(),
)


def _color_dist(a: RGB, b: RGB) -> float:
    return float(np.sqrt(sum((x - y) ** 2 for x, y in zip(a, b))))


def _sample_separated_colors(rng, n: int, min_dist: float = 0.45):
    """Rejection-sample n colors with pairwise separation (keeps the
    centroid-extraction oracle on rendered masks unambiguous)."""
    while True:
        colors = [tuple(rng.uniform(0.1, 1.0, 3).round(6)) for _ in range(n)]
        if all(
            _color_dist(colors[i], colors[j]) >= min_dist
            for i in range(n)
            for j in range(i + 1, n)
        ):
            return colors


def _sample_dynamics(rng) -> Dynamics:
    return Dynamics(
        grasp_radius=GRASP_RADIUS * float(rng.uniform(0.9, 1.1)),
        gravity=GRAVITY * float(rng.uniform(0.9, 1.1)),
    )


def sample_domain_spec(kind: str, seed: int) -> DomainSpec:
    """Seeded sampler; canonical-like kinds ignore the seed entirely."""
    if kind not in KINDS:
        raise ValueError(f"unknown domain kind '{kind}' (expected one of {KINDS})")
    if kind == "canonical":
        return CANONICAL_SPEC
    if kind == "invisible_arm":
        # objects render exactly as canonical; the arm sprite is omitted
        return DomainSpec(
            kind="invisible_arm",
            palette=CANONICAL_OBJECT_COLORS,
            background_color=CANONICAL_BACKGROUND,
            noise_amplitude=0.0,
            view_offsets=_ZERO_OFFSETS,
            arm_visible=False,
            arm_sprite=CANONICAL_SPEC.arm_sprite,
            dynamics=Dynamics(),
        )

    rng = np.random.default_rng([hash_kind(kind), seed])
    if kind == "domain_randomized":
        colors = _sample_separated_colors(rng, 5)
        # no camera jitter: paired streams must keep object centroids
        # aligned, and at 32x32 even a sub-pixel offset can quantize to a
        # >1px centroid shift on a 4px object
        return DomainSpec(
            kind=kind,
            palette=tuple(colors[:3]),
            background_color=colors[3],
            noise_amplitude=float(rng.uniform(0.0, 0.035)),
            view_offsets=_ZERO_OFFSETS,
            arm_visible=True,
            arm_sprite=ArmSprite(float(rng.uniform(0.03, 0.07)), colors[4]),
            dynamics=_sample_dynamics(rng),
        )
    if kind == "arm_randomized":
        # only the arm differs from canonical
        while True:
            arm_color = tuple(rng.uniform(0.1, 1.0, 3).round(6))
            if _color_dist(arm_color, CANONICAL_BACKGROUND) >= 0.35:
                break
        return DomainSpec(
            kind=kind,
            palette=CANONICAL_OBJECT_COLORS,
            background_color=CANONICAL_BACKGROUND,
            noise_amplitude=0.0,
            view_offsets=_ZERO_OFFSETS,
            arm_visible=True,
            arm_sprite=ArmSprite(float(rng.uniform(0.03, 0.07)), arm_color),
            dynamics=_sample_dynamics(rng),
        )
    if kind == "stick":
        return DomainSpec(
            kind=kind,
            palette=CANONICAL_OBJECT_COLORS,
            background_color=CANONICAL_BACKGROUND,
            noise_amplitude=0.0,
            view_offsets=_ZERO_OFFSETS,
            arm_visible=True,
            arm_sprite=ArmSprite(0.012, (0.75, 0.75, 0.72), style="stick"),
            dynamics=Dynamics(),
        )
    # blob_hand: large irregular sprite, altered grasp reach
    return DomainSpec(
        kind="blob_hand",
        palette=CANONICAL_OBJECT_COLORS,
        background_color=CANONICAL_BACKGROUND,
        noise_amplitude=0.0,
        view_offsets=_ZERO_OFFSETS,
        arm_visible=True,
        arm_sprite=ArmSprite(0.09, (0.85, 0.68, 0.5), style="blob"),
        dynamics=Dynamics(grasp_radius=1.3 * GRASP_RADIUS),
    )


_KIND_CODES = {k: i + 1 for i, k in enumerate(KINDS)}


def hash_kind(kind: str) -> int:
    """Stable small integer per kind, used to decorrelate sampler seeds."""
    return _KIND_CODES[kind]
