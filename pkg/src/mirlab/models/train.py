"""Seeded training loop for all representation methods.

One step: sample a batch, build the method's loss on a fresh tape, run
the reverse sweep, apply one Adam update.  Metrics (total loss, the
contrastive and policy components where present, and a fixed holdout
loss) are logged every ``log_every`` steps.  A NaN loss or gradient
aborts and restores the last logged snapshot.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np

from ..data import Batch, Dataset, dequantize, sample_batch
from ..errors import ContractError, TrainingDivergedError
from ..numerics import OptimizerState, Tensor, adam_step, backward, gather_rows, no_grad, scale
from . import losses
from .encoder import CMC_CLASSES, TDC_CLASSES, EncoderConfig, DEFAULT_CONFIG, Model

log = logging.getLogger(__name__)

METHODS = ("tcn", "tscn", "gcp", "cdgcp", "mir", "tdc", "cmc")


@dataclass(frozen=True)
class TrainConfig:
    loss_kind: str = "mir"
    steps: int = 2000
    batch_size: int = 2
    window: int = 50
    gcp_horizon: int = 20
    gcp_pairs_per_seq: int = 8
    n_pairs: int = 32  # pairs per step for gcp/cdgcp/tdc/cmc
    # Weight of the policy term inside the joint objective.  The two loss
    # scales differ by roughly this factor at our data scale; an equal
    # weight measurably distorts the embedding's temporal geometry (the
    # rank correlation between embedding distance and time drops by ~0.15).
    lambda_cdgcp: float = 0.25
    learning_rate: float = 1e-3
    seed: int = 0
    log_every: int = 100

    def __post_init__(self):
        if self.loss_kind not in METHODS:
            raise ContractError(f"unknown loss kind '{self.loss_kind}'")
        if self.steps < 0 or self.batch_size < 1 or self.window < 2:
            raise ContractError("invalid training configuration")
        if self.lambda_cdgcp < 0:
            raise ContractError("lambda_cdgcp must be >= 0")


@dataclass
class TrainResult:
    model: Model
    metrics: List[Dict]
    diverged_at: Optional[int] = None


METRIC_FIELDS = ("step", "loss", "loss_tscn", "loss_cdgcp", "holdout_loss")


# ---------------------------------------------------------------------------
# per-method loss construction


def _window_embeddings(model: Model, batch: Batch):
    b, n = batch.n_sequences, batch.window
    flat = lambda o: o.reshape(b * n, *o.shape[2:])
    x = model.encode(flat(batch.obs_a))
    x_bar = model.encode(flat(batch.obs_b))
    return x, x_bar


def _contrastive_loss(model: Model, batch: Batch, kind: str):
    """Summed window losses with in-batch extra negatives, per anchor."""
    b, n = batch.n_sequences, batch.window
    x, x_bar = _window_embeddings(model, batch)
    fn = losses.loss_tcn if kind == "tcn" else losses.loss_tscn
    total = None
    all_idx = np.arange(b * n)
    for s in range(b):
        rows = np.arange(s * n, (s + 1) * n)
        others = np.setdiff1d(all_idx, rows)
        term = fn(
            gather_rows(x, rows),
            gather_rows(x_bar, rows),
            extras=gather_rows(x_bar, others) if others.size else None,
        )
        total = term if total is None else total + term
    return scale(total, 1.0 / (b * n)), (x, x_bar)


def _policy_loss_from_windows(model: Model, batch: Batch, x, x_bar):
    """Cross-domain policy regression reusing the window embeddings."""
    b, n = batch.n_sequences, batch.window
    anchor_rows, goal_rows, targets = [], [], []
    for s in range(b):
        for (i, j) in batch.gcp_pairs[s]:
            anchor_rows.append(s * n + i)
            goal_rows.append(s * n + j)
            targets.append(batch.actions[s, i])
    pred = model.policy(gather_rows(x, anchor_rows), gather_rows(x_bar, goal_rows))
    loss = losses.loss_goal_conditioned(pred, np.array(targets))
    return scale(loss, 1.0 / len(targets))


def _gather_frames(traj, stream: str, idx) -> np.ndarray:
    obs = traj.obs_a if stream == "a" else traj.obs_b
    return dequantize(obs[np.asarray(idx, dtype=np.intp)])


def _goal_pair_loss(model: Model, dataset: Dataset, rng, cfg: TrainConfig,
                    cross_domain: bool, split: str = "train"):
    """Standalone GCP / CD-GCP objective on sampled (anchor, goal) pairs."""
    trajs = dataset.split(split)
    if cross_domain:
        usable = trajs
    else:
        # single-domain goals: invisible-arm streams are excluded
        usable = [(t, s) for t in trajs
                  for s in (("a", "b") if t.domain_kind_b != "invisible_arm" else ("a",))]
    if not usable:
        raise ContractError(f"no usable '{split}' sequences for goal-conditioned loss")
    anchors, goals, targets = [], [], []
    for _ in range(cfg.n_pairs):
        pick = usable[int(rng.integers(0, len(usable)))]
        traj, stream = (pick, "a") if cross_domain else pick
        length = traj.length
        j = int(rng.integers(1, cfg.gcp_horizon + 1))
        i = int(rng.integers(0, length - j))
        anchors.append(_gather_frames(traj, stream, [i])[0])
        goals.append(_gather_frames(traj, "b" if cross_domain else stream, [i + j])[0])
        targets.append(traj.actions[i])
    obs_embed = model.encode(np.stack(anchors))
    goal_embed = (model.encode(np.stack(goals)) if cross_domain
                  else model.encode_goal(np.stack(goals)))
    pred = model.policy(obs_embed, goal_embed)
    loss = losses.loss_goal_conditioned(pred, np.array(targets))
    return scale(loss, 1.0 / cfg.n_pairs)


_TDC_RANGES = ((1, 1), (2, 2), (3, 4), (5, 20), (21, None))


def _distance_class_loss(model: Model, dataset: Dataset, rng, cfg: TrainConfig,
                         cross_domain: bool, split: str = "train"):
    """TDC / CMC: classify the temporal distance of sampled frame pairs.

    Classes are drawn uniformly (then a distance within the class) to
    keep the five (six) categories balanced.
    """
    trajs = dataset.split(split)
    if not trajs:
        raise ContractError(f"dataset has no '{split}' trajectories")
    length = trajs[0].length
    firsts, seconds, classes = [], [], []
    n_classes = CMC_CLASSES if cross_domain else TDC_CLASSES
    for _ in range(cfg.n_pairs):
        traj = trajs[int(rng.integers(0, len(trajs)))]
        c = int(rng.integers(0, n_classes))
        if cross_domain and c == 0:
            d = 0
        else:
            lo, hi = _TDC_RANGES[c - 1 if cross_domain else c]
            hi = length - 1 if hi is None else hi
            d = int(rng.integers(lo, hi + 1))
        i = int(rng.integers(0, length - d))
        if cross_domain:
            sa, sb = "a", "b"
        else:
            sa = sb = ("a", "b")[int(rng.integers(0, 2))]
        firsts.append(_gather_frames(traj, sa, [i])[0])
        seconds.append(_gather_frames(traj, sb, [i + d])[0])
        classes.append(c)
    ea = model.encode(np.stack(firsts))
    eb = model.encode(np.stack(seconds))
    logits = model.classify(ea, eb)
    loss = losses.loss_distance_classification(logits, classes, n_classes)
    return scale(loss, 1.0 / cfg.n_pairs)


def _step_loss(model: Model, dataset: Dataset, rng, cfg: TrainConfig,
               split: str = "train"):
    """Build the loss for one step; returns (loss, components dict)."""
    kind = cfg.loss_kind
    if kind in ("tcn", "tscn"):
        batch = sample_batch(dataset, cfg.batch_size, cfg.window, rng, split,
                             cfg.gcp_horizon, cfg.gcp_pairs_per_seq)
        loss, _ = _contrastive_loss(model, batch, kind)
        return loss, {"loss_tscn": loss.item(), "loss_cdgcp": 0.0}
    if kind == "mir":
        batch = sample_batch(dataset, cfg.batch_size, cfg.window, rng, split,
                             cfg.gcp_horizon, cfg.gcp_pairs_per_seq)
        tscn, (x, x_bar) = _contrastive_loss(model, batch, "tscn")
        cdgcp = _policy_loss_from_windows(model, batch, x, x_bar)
        loss = tscn + scale(cdgcp, cfg.lambda_cdgcp)
        return loss, {"loss_tscn": tscn.item(), "loss_cdgcp": cdgcp.item()}
    if kind in ("gcp", "cdgcp"):
        loss = _goal_pair_loss(model, dataset, rng, cfg, kind == "cdgcp", split)
        return loss, {"loss_tscn": 0.0, "loss_cdgcp": loss.item()}
    loss = _distance_class_loss(model, dataset, rng, cfg, kind == "cmc", split)
    return loss, {"loss_tscn": 0.0, "loss_cdgcp": 0.0}


def holdout_loss(model: Model, dataset: Dataset, cfg: TrainConfig,
                 seed_salt: int = 991) -> float:
    """Method loss on a fixed holdout draw (fresh rng, fixed seed)."""
    rng = np.random.default_rng([cfg.seed, seed_salt])
    hold_cfg = cfg if cfg.loss_kind != "mir" else replace(cfg, loss_kind="tscn")
    with no_grad():
        loss, _ = _step_loss(model, dataset, rng, hold_cfg, split="holdout")
    return loss.item()


def train(dataset: Dataset, cfg: TrainConfig) -> TrainResult:
    """Run the seeded loop; returns the frozen model plus the metrics log."""
    model = Model.init(cfg.loss_kind, cfg.seed)
    opt = OptimizerState(learning_rate=cfg.learning_rate)
    rng = np.random.default_rng([cfg.seed, 13])
    metrics: List[Dict] = []
    snapshot = model.clone_data()

    for step_i in range(cfg.steps):
        loss, comps = _step_loss(model, dataset, rng, cfg)
        value = loss.item()
        if not np.isfinite(value):
            log.error("NaN/inf loss at step %d; restoring last checkpoint", step_i)
            model.load_data(snapshot)
            return TrainResult(model, metrics, diverged_at=step_i)
        if step_i % cfg.log_every == 0:
            # holdout is measured before this step's update, so the step-0
            # row reflects the untrained initialization
            row = {"step": step_i, "loss": value, **comps,
                   "holdout_loss": holdout_loss(model, dataset, cfg)}
            metrics.append(row)
            snapshot = model.clone_data()
            log.info("step %d: loss=%.5f holdout=%.5f", step_i, value,
                     row["holdout_loss"])
        model.zero_grads()
        backward(loss)
        try:
            adam_step(model.params, opt)
        except TrainingDivergedError:
            log.exception("diverged at step %d; restoring last checkpoint", step_i)
            model.load_data(snapshot)
            return TrainResult(model, metrics, diverged_at=step_i)
    if cfg.steps > 0:
        with no_grad():
            final_loss, comps = _step_loss(model, dataset, rng, cfg)
        metrics.append({"step": cfg.steps, "loss": final_loss.item(), **comps,
                        "holdout_loss": holdout_loss(model, dataset, cfg)})
    return TrainResult(model, metrics, diverged_at=None)


def write_metrics_csv(metrics: List[Dict], path) -> None:
    with open(path, "w") as f:
        f.write(",".join(METRIC_FIELDS) + "\n")
        for row in metrics:
            f.write(",".join(repr(row[k]) if isinstance(row[k], float) else str(row[k])
                             for k in METRIC_FIELDS) + "\n")
