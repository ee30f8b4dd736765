"""2-D manipulation world, visual domains, and rasterization."""

from .domains import (
    CANONICAL_SPEC,
    KINDS,
    ArmSprite,
    DomainSpec,
    sample_domain_spec,
)
from .render import IMG_SIZE, N_VIEWS, export_png, render, render_batch, render_obs
from .world import (
    ALL_TASKS,
    CANONICAL_DYNAMICS,
    DT,
    EPISODE_LEN,
    GRASP_RADIUS,
    HALF_SIZE,
    LIFT_THRESHOLD,
    STACK_TOL,
    Action,
    Dynamics,
    ObjectState,
    SimState,
    TaskSpec,
    reset,
    scripted_policy,
    step,
    success_predicates,
)

__all__ = [
    "ALL_TASKS",
    "Action",
    "ArmSprite",
    "CANONICAL_DYNAMICS",
    "CANONICAL_SPEC",
    "DT",
    "DomainSpec",
    "Dynamics",
    "EPISODE_LEN",
    "GRASP_RADIUS",
    "HALF_SIZE",
    "IMG_SIZE",
    "KINDS",
    "LIFT_THRESHOLD",
    "N_VIEWS",
    "ObjectState",
    "STACK_TOL",
    "SimState",
    "TaskSpec",
    "export_png",
    "render",
    "render_batch",
    "render_obs",
    "reset",
    "sample_domain_spec",
    "scripted_policy",
    "step",
    "success_predicates",
]
