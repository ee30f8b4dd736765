"""MIRD binary container for paired trajectory datasets.

Layout, all integers little-endian:

    bytes 0-3   magic "MIRD"
    bytes 4-7   u32 version (currently 1)
    bytes 8-11  u32 trajectory count
    per trajectory:
        u32 metadata length, then that many bytes of UTF-8 JSON
        actions as float32, row-major, shape from metadata
        obs_a then obs_b as uint8, shapes from metadata

The dataset manifest is appended after the last trajectory as one
length-prefixed JSON record.  Round-trips are bit-identical.
"""

from __future__ import annotations

import json
import struct
from typing import BinaryIO

import numpy as np

from ..errors import FormatError
from .episodes import Dataset, PairedTrajectory

MAGIC = b"MIRD"
VERSION = 1


def _read_exact(f: BinaryIO, n: int, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated file while reading {what}", offset=f.tell())
    return buf


def save(dataset: Dataset, path) -> None:
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(dataset.trajectories)))
        for traj in dataset.trajectories:
            meta = json.dumps(traj.meta(), sort_keys=True).encode()
            f.write(struct.pack("<I", len(meta)))
            f.write(meta)
            f.write(traj.actions.astype("<f4").tobytes())
            f.write(np.ascontiguousarray(traj.obs_a).tobytes())
            f.write(np.ascontiguousarray(traj.obs_b).tobytes())
        manifest = json.dumps(dataset.manifest, sort_keys=True).encode()
        f.write(struct.pack("<I", len(manifest)))
        f.write(manifest)


def load(path) -> Dataset:
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
        version, count = struct.unpack("<II", _read_exact(f, 8, "header"))
        if version != VERSION:
            raise FormatError(f"unsupported version {version}", offset=4)
        trajectories = []
        for i in range(count):
            (mlen,) = struct.unpack("<I", _read_exact(f, 4, f"metadata length #{i}"))
            try:
                meta = json.loads(_read_exact(f, mlen, f"metadata #{i}"))
            except json.JSONDecodeError as e:
                raise FormatError(f"bad metadata JSON in record {i}: {e}",
                                  offset=f.tell())
            try:
                ashape = tuple(meta["actions_shape"])
                oshape = tuple(meta["obs_shape"])
            except KeyError as e:
                raise FormatError(f"metadata record {i} missing {e}", offset=f.tell())
            na = int(np.prod(ashape))
            no = int(np.prod(oshape))
            actions = np.frombuffer(
                _read_exact(f, 4 * na, f"actions #{i}"), dtype="<f4"
            ).reshape(ashape).astype(np.float64)
            obs_a = np.frombuffer(
                _read_exact(f, no, f"obs_a #{i}"), dtype=np.uint8
            ).reshape(oshape).copy()
            obs_b = np.frombuffer(
                _read_exact(f, no, f"obs_b #{i}"), dtype=np.uint8
            ).reshape(oshape).copy()
            trajectories.append(
                PairedTrajectory(
                    task_id=meta["task_id"],
                    seed=meta["seed"],
                    pairing=meta["pairing"],
                    domain_kind_a=meta["domain_kind_a"],
                    domain_kind_b=meta["domain_kind_b"],
                    split=meta["split"],
                    actions=actions,
                    obs_a=obs_a,
                    obs_b=obs_b,
                )
            )
        (mlen,) = struct.unpack("<I", _read_exact(f, 4, "manifest length"))
        manifest = json.loads(_read_exact(f, mlen, "manifest"))
    return Dataset(trajectories=trajectories, manifest=manifest)
