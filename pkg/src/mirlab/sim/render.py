"""Deterministic rasterization of sim states under a visual domain.

Images are 32x32 RGB, float64 in [0,1], channel-first (3, 32, 32).
View 0 frames the full unit workspace, view 1 zooms on its lower half.
Pixel noise is seeded per (episode, frame, view) so a stored image can
always be regenerated bit-identically.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .domains import DomainSpec
from .world import SimState

IMG_SIZE = 32
N_VIEWS = 2


def _pixel_grid(view: int, offsets):
    ox, oy = offsets
    idx = (np.arange(IMG_SIZE) + 0.5) / IMG_SIZE
    xs = idx + ox
    if view == 0:
        ys = 1.0 - idx + oy
    elif view == 1:
        ys = 0.5 * (1.0 - idx) + oy
    else:
        raise ValueError(f"view must be 0 or 1, got {view}")
    # X varies along columns, Y along rows
    return np.meshgrid(xs, ys)


def _shape_mask(px, py, cx, cy, half, tag):
    dx, dy = px - cx, py - cy
    if tag == "circle":
        return dx * dx + dy * dy <= half * half
    if tag == "triangle":
        return (np.abs(dy) <= half) & (np.abs(dx) <= 0.5 * (half - dy))
    return (np.abs(dx) <= half) & (np.abs(dy) <= half)  # square


def _arm_mask(px, py, gx, gy, sprite):
    if sprite.style == "stick":
        # thin slanted rod whose visual tip sits offset from the grip point
        tipx, tipy = gx + 0.02, gy + 0.01
        dirx, diry = 0.28, 0.96
        relx, rely = px - tipx, py - tipy
        t = np.clip(relx * dirx + rely * diry, 0.0, 0.45)
        distx = relx - t * dirx
        disty = rely - t * diry
        return distx * distx + disty * disty <= sprite.radius * sprite.radius
    if sprite.style == "blob":
        r = sprite.radius
        m = np.zeros(px.shape, dtype=bool)
        for ox, oy, s in ((0.0, 0.0, 1.0), (-0.6 * r, 0.7 * r, 0.7), (0.7 * r, 0.6 * r, 0.55)):
            dx, dy = px - (gx + ox), py - (gy + oy)
            m |= dx * dx + dy * dy <= (s * r) ** 2
        return m
    dx, dy = px - gx, py - gy
    return dx * dx + dy * dy <= sprite.radius * sprite.radius


def render(
    state: SimState,
    domain: DomainSpec,
    view: int,
    noise_seed: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Rasterize one view of a state; pure in all of its arguments."""
    px, py = _pixel_grid(view, domain.view_offsets[view])
    img = np.empty((3, IMG_SIZE, IMG_SIZE), dtype=np.float64)
    for c in range(3):
        img[c].fill(domain.background_color[c])
    # arm sits behind the objects: object pixels are then identical across
    # domains that share a palette, which keeps centroid alignment exact
    if domain.arm_visible:
        m = _arm_mask(px, py, state.gripper_pos[0], state.gripper_pos[1], domain.arm_sprite)
        for c in range(3):
            img[c][m] = domain.arm_sprite.color[c]
    for obj in state.objects:
        m = _shape_mask(px, py, obj.pos[0], obj.pos[1], obj.half_size, obj.shape_tag)
        color = domain.palette[obj.color_id]
        for c in range(3):
            img[c][m] = color[c]
    if domain.noise_amplitude > 0.0 and noise_seed is not None:
        rng = np.random.default_rng(list(noise_seed))
        img += rng.uniform(-domain.noise_amplitude, domain.noise_amplitude, img.shape)
        np.clip(img, 0.0, 1.0, out=img)
    return img


def render_obs(state: SimState, domain: DomainSpec, episode_seed: int, frame: int) -> np.ndarray:
    """Both views of one frame, shape (2, 3, 32, 32)."""
    return np.stack(
        [
            render(state, domain, v, noise_seed=(episode_seed, frame, v))
            for v in range(N_VIEWS)
        ]
    )


def render_batch(states, domain: DomainSpec, view: int) -> np.ndarray:
    """Noise-free renders of many states (planner hot path), (N, 3, 32, 32)."""
    return np.stack([render(s, domain, view) for s in states])


def export_png(img: np.ndarray, path) -> None:
    """Write a (3, H, W) float image as an 8-bit RGB PNG (debug aid)."""
    from PIL import Image

    arr = np.clip(np.asarray(img), 0.0, 1.0)
    u8 = (arr * 255.0 + 0.5).astype(np.uint8).transpose(1, 2, 0)
    Image.fromarray(u8, mode="RGB").save(path)
