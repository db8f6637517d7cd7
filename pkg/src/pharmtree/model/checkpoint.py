"""Single-file model checkpoints.

Layout, little-endian throughout: 4-byte magic, uint32 format version,
uint32 config-JSON length, config JSON (UTF-8), uint32 array count, then per
array a uint16 name length, the name, a uint8 rank, uint64 dims, and raw
float32 data. A sha256 digest of everything before it closes the file.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..errors import ChecksumError, UnsupportedVersion
from .decoder import ModelConfig, SynthModel

MAGIC = b"PTCK"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Checkpoint:
    version: int
    config: dict          # {"model": ..., "train": ..., "catalog_hash": ...}
    params: dict[str, np.ndarray]

    @property
    def catalog_hash(self) -> str:
        return self.config["catalog_hash"]

    def model_config(self) -> ModelConfig:
        return ModelConfig.from_json(self.config["model"])

    def build_model(self) -> SynthModel:
        """Instantiate the model and load every stored tensor into it."""
        model = SynthModel(self.model_config())
        state = {name: torch.from_numpy(arr.copy()) for name, arr in self.params.items()}
        model.load_state_dict(state)
        model.eval()
        return model


def checkpoint_from_model(model: SynthModel, train_config: dict, catalog_hash: str) -> Checkpoint:
    params = {
        name: tensor.detach().cpu().numpy().astype(np.float32)
        for name, tensor in model.state_dict().items()
    }
    config = {
        "model": model.cfg.to_json(),
        "train": train_config,
        "catalog_hash": catalog_hash,
    }
    return Checkpoint(FORMAT_VERSION, config, params)


def save_checkpoint(ckpt: Checkpoint, path: str | Path) -> None:
    config_json = json.dumps(ckpt.config, sort_keys=True, separators=(",", ":")).encode()
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", ckpt.version)
    out += struct.pack("<I", len(config_json))
    out += config_json
    out += struct.pack("<I", len(ckpt.params))
    for name in sorted(ckpt.params):
        arr = np.ascontiguousarray(ckpt.params[name], dtype=np.float32)
        name_b = name.encode()
        out += struct.pack("<H", len(name_b))
        out += name_b
        out += struct.pack("<B", arr.ndim)
        out += struct.pack(f"<{arr.ndim}Q", *arr.shape) if arr.ndim else b""
        out += arr.tobytes(order="C")
    out += hashlib.sha256(bytes(out)).digest()
    Path(path).write_bytes(bytes(out))


def load_checkpoint(path: str | Path) -> Checkpoint:
    blob = Path(path).read_bytes()
    if len(blob) < 44 or blob[:4] != MAGIC:
        raise ChecksumError(f"{path}: not a checkpoint file")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise ChecksumError(f"{path}: digest mismatch")
    off = 4
    (version,) = struct.unpack_from("<I", body, off)
    off += 4
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    (cfg_len,) = struct.unpack_from("<I", body, off)
    off += 4
    config = json.loads(body[off : off + cfg_len].decode())
    off += cfg_len
    (n_arrays,) = struct.unpack_from("<I", body, off)
    off += 4
    params: dict[str, np.ndarray] = {}
    for _ in range(n_arrays):
        (name_len,) = struct.unpack_from("<H", body, off)
        off += 2
        name = body[off : off + name_len].decode()
        off += name_len
        (ndim,) = struct.unpack_from("<B", body, off)
        off += 1
        shape = struct.unpack_from(f"<{ndim}Q", body, off) if ndim else ()
        off += 8 * ndim
        count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        arr = np.frombuffer(body, dtype="<f4", count=count, offset=off).reshape(shape)
        off += 4 * count
        params[name] = arr.copy()
    if off != len(body):
        raise ChecksumError(f"{path}: {len(body) - off} trailing bytes")
    return Checkpoint(version, config, params)
