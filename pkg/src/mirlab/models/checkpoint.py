"""MIRM checkpoint files.

Layout: magic "MIRM", u32 version, u32 length-prefixed JSON architecture
record (method, encoder configuration, parameter names and shapes in
order), then the parameter blobs as little-endian float64 in that order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import FormatError
from ..numerics import Tensor
from .encoder import EncoderConfig, Model

MAGIC = b"MIRM"
VERSION = 1


def save_model(model: Model, path) -> None:
    names = sorted(model.params)
    arch = {
        "method": model.method,
        "config": {
            "channels": list(model.cfg.channels),
            "feature_dim": model.cfg.feature_dim,
            "fusion_widths": list(model.cfg.fusion_widths),
            "embed_dim": model.cfg.embed_dim,
            "policy_widths": list(model.cfg.policy_widths),
            "action_dim": model.cfg.action_dim,
            "head_widths": list(model.cfg.head_widths),
        },
        "params": [{"name": n, "shape": list(model.params[n].shape)} for n in names],
    }
    blob = json.dumps(arch, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(blob)))
        f.write(blob)
        for n in names:
            f.write(np.ascontiguousarray(model.params[n].data, dtype="<f8").tobytes())


def load_model(path) -> Model:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
        header = f.read(8)
        if len(header) != 8:
            raise FormatError("truncated header", offset=4)
        version, blob_len = struct.unpack("<II", header)
        if version != VERSION:
            raise FormatError(f"unsupported checkpoint version {version}", offset=4)
        try:
            arch = json.loads(f.read(blob_len))
        except json.JSONDecodeError as e:
            raise FormatError(f"bad architecture JSON: {e}", offset=12)
        cfg = EncoderConfig(
            channels=tuple(arch["config"]["channels"]),
            feature_dim=arch["config"]["feature_dim"],
            fusion_widths=tuple(arch["config"]["fusion_widths"]),
            embed_dim=arch["config"]["embed_dim"],
            policy_widths=tuple(arch["config"]["policy_widths"]),
            action_dim=arch["config"]["action_dim"],
            head_widths=tuple(arch["config"]["head_widths"]),
        )
        params = {}
        for rec in arch["params"]:
            shape = tuple(rec["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = f.read(8 * count)
            if len(raw) != 8 * count:
                raise FormatError(f"truncated blob for '{rec['name']}'", offset=f.tell())
            params[rec["name"]] = Tensor(
                np.frombuffer(raw, dtype="<f8").reshape(shape).copy(),
                requires_grad=True,
            )
    return Model(method=arch["method"], cfg=cfg, params=params)
