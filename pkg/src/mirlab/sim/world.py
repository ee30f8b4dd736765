"""Deterministic 2-D planar manipulation world.

A point gripper and three colored geometric objects live in the unit
workspace (x right, y up).  The gripper moves with clamped velocities,
can grasp the nearest object within reach, and unheld objects fall until
they rest on the floor or on another object.  States are values: every
step returns a fresh state and identical inputs give bit-identical
outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from ..errors import PlacementError

# workspace and episode constants (documented in the README)
DT = 0.1
EPISODE_LEN = 100
HALF_SIZE = 0.06
GRASP_RADIUS = 1.2 * HALF_SIZE
LIFT_THRESHOLD = 0.15
STACK_TOL = 0.6 * HALF_SIZE
GRAVITY = 2.5  # workspace units / s^2-ish; applied as a settle velocity

COLOR_NAMES = ("red", "green", "blue")
SHAPE_TAGS = ("square", "circle", "triangle")


@dataclass(frozen=True)
class ObjectState:
    pos: Tuple[float, float]
    half_size: float
    shape_tag: str
    color_id: int


@dataclass(frozen=True)
class SimState:
    gripper_pos: Tuple[float, float]
    grip_closed: bool
    held_object: Optional[int]
    objects: Tuple[ObjectState, ...]
    time_step: int = 0


@dataclass(frozen=True)
class TaskSpec:
    """Stack the top-colored object onto the bottom-colored one."""

    top_color: int
    bottom_color: int

    @property
    def distractor_color(self) -> int:
        return 3 - self.top_color - self.bottom_color

    @property
    def task_id(self) -> str:
        return f"{COLOR_NAMES[self.top_color]}_on_{COLOR_NAMES[self.bottom_color]}"


ALL_TASKS = tuple(
    TaskSpec(a, b) for a in range(3) for b in range(3) if a != b
)


@dataclass(frozen=True)
class Action:
    velocity: Tuple[float, float]
    grip_command: float

    def clamped(self) -> "Action":
        vx = min(1.0, max(-1.0, self.velocity[0]))
        vy = min(1.0, max(-1.0, self.velocity[1]))
        g = min(1.0, max(-1.0, self.grip_command))
        return Action((vx, vy), g)

    def as_array(self) -> np.ndarray:
        return np.array([self.velocity[0], self.velocity[1], self.grip_command])


@dataclass(frozen=True)
class Dynamics:
    """Physical parameters; randomized domains may perturb them +-10%."""

    grasp_radius: float = GRASP_RADIUS
    gravity: float = GRAVITY


CANONICAL_DYNAMICS = Dynamics()


def _object_index(state: SimState, color_id: int) -> int:
    for i, o in enumerate(state.objects):
        if o.color_id == color_id:
            return i
    raise ValueError(f"no object with color_id {color_id}")


def reset(task: TaskSpec, seed: int) -> SimState:
    """Seeded initial state: objects resting on the floor, non-overlapping."""
    rng = np.random.default_rng(seed)
    for _ in range(100):
        xs = rng.uniform(0.12, 0.88, size=3)
        ok = all(
            abs(xs[i] - xs[j]) >= 2 * HALF_SIZE + 0.02
            for i in range(3)
            for j in range(i + 1, 3)
        )
        if ok:
            break
    else:
        raise PlacementError("could not place 3 objects after 100 rejection samples")
    objects = tuple(
        ObjectState(
            pos=(float(xs[c]), HALF_SIZE),
            half_size=HALF_SIZE,
            shape_tag=SHAPE_TAGS[c],
            color_id=c,
        )
        for c in range(3)
    )
    gx = float(rng.uniform(0.15, 0.85))
    gy = float(rng.uniform(0.6, 0.9))
    return SimState(
        gripper_pos=(gx, gy),
        grip_closed=False,
        held_object=None,
        objects=objects,
        time_step=0,
    )


def _rest_height(objects, idx, held_idx) -> float:
    """Resting height for object idx given the objects below it."""
    o = objects[idx]
    rest = o.half_size
    for j, other in enumerate(objects):
        if j == idx or j == held_idx:
            continue
        if other.pos[1] >= o.pos[1]:
            continue
        if abs(other.pos[0] - o.pos[0]) <= other.half_size + o.half_size - 1e-9:
            rest = max(rest, other.pos[1] + other.half_size + o.half_size)
    return rest


def _settle(objects, held_idx, gravity, dt) -> tuple:
    """Drop unheld objects by one gravity increment, resolving supports."""
    order = sorted(range(len(objects)), key=lambda i: objects[i].pos[1])
    objs = list(objects)
    for i in order:
        if i == held_idx:
            continue
        o = objs[i]
        rest = _rest_height(objs, i, held_idx)
        y = o.pos[1]
        if y > rest:
            y = max(rest, y - gravity * dt)
        else:
            y = rest
        objs[i] = replace(o, pos=(o.pos[0], y))
    return tuple(objs)


def step(
    state: SimState,
    action: Action,
    dt: float = DT,
    dynamics: Dynamics = CANONICAL_DYNAMICS,
) -> SimState:
    """Advance the world by one control interval.  Total function."""
    a = action.clamped()
    gx = min(1.0, max(0.0, state.gripper_pos[0] + a.velocity[0] * dt))
    gy = min(1.0, max(0.0, state.gripper_pos[1] + a.velocity[1] * dt))
    closed = a.grip_command > 0.0
    held = state.held_object
    objs = list(state.objects)

    if held is not None and not closed:
        held = None  # release; the object settles below
    if held is None and closed:
        best, best_d = None, dynamics.grasp_radius
        for i, o in enumerate(objs):
            d = float(np.hypot(o.pos[0] - gx, o.pos[1] - gy))
            if d <= best_d:
                best, best_d = i, d
        held = best
    if held is not None:
        objs[held] = replace(objs[held], pos=(gx, gy))

    objects = _settle(tuple(objs), held, dynamics.gravity, dt)
    return SimState(
        gripper_pos=(gx, gy),
        grip_closed=closed,
        held_object=held,
        objects=objects,
        time_step=state.time_step + 1,
    )


def success_predicates(state: SimState, task: TaskSpec) -> dict:
    """Instantaneous lifted/stacked predicates for the task's top object.

    ``lifted`` requires the object to be *held* above the threshold: an
    object that was grabbed, raised, and dropped is falling (or back at
    rest) unheld, and earns no lift credit.
    """
    top_idx = _object_index(state, task.top_color)
    top = state.objects[top_idx]
    bottom = state.objects[_object_index(state, task.bottom_color)]
    lifted = (state.held_object == top_idx
              and top.pos[1] >= top.half_size + LIFT_THRESHOLD)
    resting = state.held_object != top_idx
    contact_y = bottom.pos[1] + bottom.half_size + top.half_size
    stacked = (
        resting
        and abs(top.pos[0] - bottom.pos[0]) <= STACK_TOL
        and abs(top.pos[1] - contact_y) <= 1e-6
    )
    return {"lifted": bool(lifted), "stacked": bool(stacked)}


# ---------------------------------------------------------------------------
# scripted demonstrator


_CARRY_HEIGHT = 0.5
_RETREAT_HEIGHT = 0.8
_GAIN = 8.0
_DEMO_SPEED = 0.3


def _drive(gpos, target) -> Tuple[float, float]:
    # The cruise speed is capped well below the actuator limit so that a
    # demonstration's motion spans most of the episode.  An unthrottled
    # controller finishes in ~25 frames and then holds still, leaving a
    # long visually-static tail: frames there are identical, so no image
    # encoder can order them in time, which degrades every temporal
    # evaluation downstream (rank correlations, goal spacing).
    return (
        min(_DEMO_SPEED, max(-_DEMO_SPEED, _GAIN * (target[0] - gpos[0]))),
        min(_DEMO_SPEED, max(-_DEMO_SPEED, _GAIN * (target[1] - gpos[1]))),
    )


def scripted_policy(state: SimState, task: TaskSpec) -> Action:
    """Finite-state stacking controller, a pure function of the state.

    Reach above the top object, descend, grasp, carry at height, center
    over the bottom object, lower to contact, release, retreat.  Falls
    back to holding position once the stack is in place.
    """
    top_idx = _object_index(state, task.top_color)
    top = state.objects[top_idx]
    bottom = state.objects[_object_index(state, task.bottom_color)]
    g = state.gripper_pos

    if state.held_object == top_idx:
        stack_y = bottom.pos[1] + bottom.half_size + top.half_size
        if abs(g[0] - bottom.pos[0]) > 0.25 * STACK_TOL:
            # ascend to carry height first so every demo passes the lift stage
            if g[1] < _CARRY_HEIGHT - 0.02:
                return Action(_drive(g, (g[0], _CARRY_HEIGHT)), 1.0)
            return Action(_drive(g, (bottom.pos[0], max(g[1], stack_y))), 1.0)
        if g[1] > stack_y + 1e-3:
            return Action(_drive(g, (bottom.pos[0], stack_y)), 1.0)
        return Action((0.0, 0.0), -1.0)  # at contact: open

    if success_predicates(state, task)["stacked"]:
        if g[1] < _RETREAT_HEIGHT - 0.02:
            return Action(_drive(g, (g[0], _RETREAT_HEIGHT)), -1.0)
        return Action((0.0, 0.0), -1.0)

    # not holding: go get the top object
    d = float(np.hypot(top.pos[0] - g[0], top.pos[1] - g[1]))
    if d <= 0.8 * GRASP_RADIUS:
        return Action(_drive(g, top.pos), 1.0)
    if abs(g[0] - top.pos[0]) > 0.5 * GRASP_RADIUS:
        travel_y = max(g[1], top.pos[1] + 0.15)
        return Action(_drive(g, (top.pos[0], travel_y)), -1.0)
    return Action(_drive(g, top.pos), -1.0)
