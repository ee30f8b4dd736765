"""Two-view convolutional encoder, policy heads, and model containers.

The encoder runs each 3x32x32 view through a shared stack of four
[stride-1 conv -> stride-2 conv] stages (channels 8, 16, 32, 64, ReLU
after every conv), a per-view linear layer, then fuses the concatenated
view features with a 3-layer MLP down to the embedding.  Policy and
distance-classifier heads are small MLPs over embeddings.  Parameters
are plain named Tensors; initialization is seeded uniform fan-in.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import ShapeError
from ..numerics import Tensor, concat, conv2d, linear, matmul, relu, reshape

IMG_HW = 32
N_VIEWS = 2


@dataclass(frozen=True)
class EncoderConfig:
    channels: Tuple[int, ...] = (8, 16, 32, 64)
    feature_dim: int = 64
    fusion_widths: Tuple[int, ...] = (128, 128)
    embed_dim: int = 64
    policy_widths: Tuple[int, ...] = (64, 64)
    action_dim: int = 3
    head_widths: Tuple[int, ...] = (64,)  # distance-classifier hidden sizes

    def conv_layers(self):
        """(c_in, c_out, stride) for the eight convolutions."""
        layers = []
        c_prev = 3
        for c in self.channels:
            layers.append((c_prev, c, 1))
            layers.append((c, c, 2))
            c_prev = c
        return layers

    @property
    def conv_out_dim(self) -> int:
        hw = IMG_HW // (2 ** len(self.channels))
        return self.channels[-1] * hw * hw


DEFAULT_CONFIG = EncoderConfig()


def _uniform(rng, shape, fan_in):
    # variance-preserving uniform init for ReLU stacks; a smaller scale
    # collapses the 12-layer encoder's activations (and the contrastive
    # logits with them) to ~0, stalling training at the uniform-softmax
    # plateau
    limit = np.sqrt(6.0 / fan_in)
    return Tensor(rng.uniform(-limit, limit, shape), requires_grad=True)


def init_encoder_params(rng, cfg: EncoderConfig, prefix: str) -> Dict[str, Tensor]:
    p: Dict[str, Tensor] = {}
    for i, (cin, cout, _) in enumerate(cfg.conv_layers()):
        p[f"{prefix}.conv{i}.w"] = _uniform(rng, (cout, cin, 3, 3), cin * 9)
        p[f"{prefix}.conv{i}.b"] = Tensor(np.zeros(cout), requires_grad=True)
    p[f"{prefix}.view.w"] = _uniform(rng, (cfg.conv_out_dim, cfg.feature_dim), cfg.conv_out_dim)
    p[f"{prefix}.view.b"] = Tensor(np.zeros(cfg.feature_dim), requires_grad=True)
    sizes = (N_VIEWS * cfg.feature_dim,) + cfg.fusion_widths + (cfg.embed_dim,)
    for i, (a, b) in enumerate(zip(sizes[:-1], sizes[1:])):
        p[f"{prefix}.fuse{i}.w"] = _uniform(rng, (a, b), a)
        p[f"{prefix}.fuse{i}.b"] = Tensor(np.zeros(b), requires_grad=True)
    return p


def init_mlp_params(rng, sizes, prefix: str) -> Dict[str, Tensor]:
    p: Dict[str, Tensor] = {}
    for i, (a, b) in enumerate(zip(sizes[:-1], sizes[1:])):
        p[f"{prefix}.l{i}.w"] = _uniform(rng, (a, b), a)
        p[f"{prefix}.l{i}.b"] = Tensor(np.zeros(b), requires_grad=True)
    return p


def mlp_forward(params: Dict[str, Tensor], x: Tensor, prefix: str, n_layers: int) -> Tensor:
    for i in range(n_layers):
        x = linear(x, params[f"{prefix}.l{i}.w"], params[f"{prefix}.l{i}.b"])
        if i < n_layers - 1:
            x = relu(x)
    return x


def _to_nhwc_views(obs: np.ndarray) -> np.ndarray:
    """(N, 2, 3, 32, 32) observations -> (2N, 32, 32, 3) view batch."""
    obs = np.asarray(obs, dtype=np.float64)
    if obs.ndim == 4:
        obs = obs[None]
    if obs.ndim != 5 or obs.shape[1:] != (N_VIEWS, 3, IMG_HW, IMG_HW):
        raise ShapeError(
            f"encode: expected (N, {N_VIEWS}, 3, {IMG_HW}, {IMG_HW}) observations, "
            f"got {obs.shape}"
        )
    n = obs.shape[0]
    return np.ascontiguousarray(
        obs.reshape(n * N_VIEWS, 3, IMG_HW, IMG_HW).transpose(0, 2, 3, 1)
    )


def encode(params: Dict[str, Tensor], obs, cfg: EncoderConfig = DEFAULT_CONFIG,
           prefix: str = "enc") -> Tensor:
    """Map N two-view observations to an (N, embed_dim) embedding tensor."""
    views = _to_nhwc_views(obs)
    x = Tensor(views)
    for i, (_, _, stride) in enumerate(cfg.conv_layers()):
        x = relu(conv2d(x, params[f"{prefix}.conv{i}.w"], params[f"{prefix}.conv{i}.b"],
                        stride=stride))
    n2 = views.shape[0]
    x = reshape(x, (n2, cfg.conv_out_dim))
    x = linear(x, params[f"{prefix}.view.w"], params[f"{prefix}.view.b"])
    x = reshape(x, (n2 // N_VIEWS, N_VIEWS * cfg.feature_dim))
    n_fuse = len(cfg.fusion_widths) + 1
    for i in range(n_fuse):
        x = linear(x, params[f"{prefix}.fuse{i}.w"], params[f"{prefix}.fuse{i}.b"])
        if i < n_fuse - 1:
            x = relu(x)
    return x


TDC_CLASSES = 5
CMC_CLASSES = 6


@dataclass
class Model:
    """A trained (or initializing) method: encoder plus optional heads.

    ``method`` is one of tcn | tscn | gcp | cdgcp | mir | tdc | cmc.
    The goal encoder exists only for the plain GCP baseline; cross-domain
    policies share the observation encoder for goals as well.
    """

    method: str
    cfg: EncoderConfig
    params: Dict[str, Tensor]

    @classmethod
    def init(cls, method: str, seed: int, cfg: EncoderConfig = DEFAULT_CONFIG) -> "Model":
        rng = np.random.default_rng([seed, 77])
        params = init_encoder_params(rng, cfg, "enc")
        if method == "gcp":
            params.update(init_encoder_params(rng, cfg, "goal"))
        if method in ("gcp", "cdgcp", "mir"):
            sizes = (2 * cfg.embed_dim,) + cfg.policy_widths + (cfg.action_dim,)
            params.update(init_mlp_params(rng, sizes, "pol"))
        if method == "tdc":
            sizes = (2 * cfg.embed_dim,) + cfg.head_widths + (TDC_CLASSES,)
            params.update(init_mlp_params(rng, sizes, "cls"))
        if method == "cmc":
            sizes = (2 * cfg.embed_dim,) + cfg.head_widths + (CMC_CLASSES,)
            params.update(init_mlp_params(rng, sizes, "cls"))
        return cls(method=method, cfg=cfg, params=params)

    # -- forward passes -----------------------------------------------------
    def encode(self, obs) -> Tensor:
        return encode(self.params, obs, self.cfg, "enc")

    def encode_goal(self, obs) -> Tensor:
        prefix = "goal" if any(k.startswith("goal.") for k in self.params) else "enc"
        return encode(self.params, obs, self.cfg, prefix)

    def policy(self, obs_embed: Tensor, goal_embed: Tensor) -> Tensor:
        x = concat([obs_embed, goal_embed], axis=1)
        return mlp_forward(self.params, x, "pol", len(self.cfg.policy_widths) + 1)

    def classify(self, embed_a: Tensor, embed_b: Tensor) -> Tensor:
        x = concat([embed_a, embed_b], axis=1)
        return mlp_forward(self.params, x, "cls", len(self.cfg.head_widths) + 1)

    # -- numpy-only embedding used by evaluation hot paths ------------------
    def embed_array(self, obs) -> np.ndarray:
        from ..numerics import no_grad

        with no_grad():
            return self.encode(obs).data

    def zero_grads(self):
        for t in self.params.values():
            t.zero_grad()

    def clone_data(self) -> Dict[str, np.ndarray]:
        return {k: t.data.copy() for k, t in self.params.items()}

    def load_data(self, blobs: Dict[str, np.ndarray]):
        for k, t in self.params.items():
            t.data = blobs[k].copy()
