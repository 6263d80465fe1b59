"""Weights container, manifest validation, and seeded weight generation.

File format (all integers little-endian)::

    magic   4 bytes  "NESW"
    version u8       1
    count   u32      number of tensor records
    record  (repeated ``count`` times)
        name_len u16
        name     name_len bytes, UTF-8
        rank     u8
        dims     u32 * rank
        data     f32 * prod(dims)
    footer  u32      CRC32 of every byte before the footer

A TensorMap is an ordered ``dict`` mapping tensor name to a float32
ndarray. A Manifest maps required tensor names to their shapes.

Seeded generation is fully specified so test vectors can be reproduced
anywhere. Per tensor, a 64-bit linear congruential generator

    state[j+1] = (6364136223846793005 * state[j] + 1442695040888963407) mod 2**64
    state[0]   = (seed * 0x9E3779B97F4A7C15 + crc32(name_utf8)) mod 2**64

yields value j as ``((state[j+1] >> 40) / 2**23 - 1) * g`` rounded to
float32, where g = 1/sqrt(fan_in) and fan_in is prod(shape[1:]) for
rank >= 2 tensors and shape[0] for vectors. Values fill the tensor in
row-major order.
"""

from __future__ import annotations

import struct
import zlib
from typing import Dict, Tuple

import numpy as np

from .errors import (
    ChecksumError,
    DuplicateTensorError,
    ManifestError,
    TruncatedWeightsError,
    WeightsFormatError,
)

TensorMap = Dict[str, np.ndarray]
Manifest = Dict[str, Tuple[int, ...]]

MAGIC = b"NESW"
VERSION = 1

_LCG_MULT = 6364136223846793005
_LCG_INC = 1442695040888963407
_SEED_MIX = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def save_weights(tensors: TensorMap, path) -> None:
    """Serialize a TensorMap; floats are stored bit-exactly."""
    parts = [MAGIC, struct.pack("<BI", VERSION, len(tensors))]
    for name, array in tensors.items():
        data = np.ascontiguousarray(array, dtype="<f4")
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", data.ndim))
        parts.append(struct.pack(f"<{data.ndim}I", *data.shape))
        parts.append(data.tobytes())
    payload = b"".join(parts)
    with open(path, "wb") as f:
        f.write(payload)
        f.write(struct.pack("<I", zlib.crc32(payload)))


def load_weights(path) -> TensorMap:
    """Load a TensorMap, verifying structure and the CRC32 footer."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 13:
        raise TruncatedWeightsError(f"{path}: file too short to be a weights container")
    payload, footer = blob[:-4], blob[-4:]
    if payload[:4] != MAGIC:
        raise WeightsFormatError(f"{path}: bad magic {payload[:4]!r}")
    version, count = struct.unpack_from("<BI", payload, 4)
    if version != VERSION:
        raise WeightsFormatError(f"{path}: unsupported version {version}")
    (crc,) = struct.unpack("<I", footer)
    if crc != zlib.crc32(payload):
        raise ChecksumError(f"{path}: CRC32 mismatch, file corrupted")

    tensors: TensorMap = {}
    offset = 9
    for _ in range(count):
        try:
            (name_len,) = struct.unpack_from("<H", payload, offset)
            offset += 2
            if len(payload) < offset + name_len:
                raise struct.error("name overruns file")
            name = payload[offset : offset + name_len].decode("utf-8")
            offset += name_len
            (rank,) = struct.unpack_from("<B", payload, offset)
            offset += 1
            dims = struct.unpack_from(f"<{rank}I", payload, offset)
            offset += 4 * rank
            size = int(np.prod(dims, dtype=np.int64)) if rank else 1
            end = offset + 4 * size
            if end > len(payload):
                raise struct.error("tensor data overruns file")
            data = np.frombuffer(payload[offset:end], dtype="<f4").reshape(dims)
            offset = end
        except struct.error as exc:
            raise TruncatedWeightsError(f"{path}: truncated record ({exc})") from exc
        if name in tensors:
            raise DuplicateTensorError(f"{path}: duplicate tensor {name!r}")
        tensors[name] = data.copy()
    if offset != len(payload):
        raise WeightsFormatError(f"{path}: {len(payload) - offset} trailing bytes")
    return tensors


def validate_tensors(tensors: TensorMap, manifest: Manifest) -> None:
    """Check that every manifest entry is present with the right shape."""
    for name, shape in manifest.items():
        if name not in tensors:
            raise ManifestError(f"missing tensor {name!r} (expected shape {shape})")
        actual = tuple(tensors[name].shape)
        if actual != tuple(shape):
            raise ManifestError(
                f"tensor {name!r} has shape {actual}, expected {tuple(shape)}"
            )


def _fan_in(shape: Tuple[int, ...]) -> int:
    if len(shape) >= 2:
        return int(np.prod(shape[1:], dtype=np.int64))
    return int(shape[0])


def random_weights(manifest: Manifest, seed: int) -> TensorMap:
    """Generate a manifest-complete TensorMap from the documented LCG."""
    tensors: TensorMap = {}
    for name, shape in manifest.items():
        n = int(np.prod(shape, dtype=np.int64))
        s0 = (seed * _SEED_MIX + zlib.crc32(name.encode("utf-8"))) & _MASK64
        with np.errstate(over="ignore"):
            mult = np.full(n, _LCG_MULT, dtype=np.uint64)
            powers = np.cumprod(mult)  # a^(j+1), wrapping mod 2**64
            geometric = np.cumsum(np.concatenate(
                ([np.uint64(1)], powers[:-1])))  # 1 + a + ... + a^j
            states = powers * np.uint64(s0) + geometric * np.uint64(_LCG_INC)
        unit = (states >> np.uint64(40)).astype(np.float64) / 2.0**23 - 1.0
        scale = 1.0 / np.sqrt(_fan_in(tuple(shape)))
        tensors[name] = (unit * scale).astype(np.float32).reshape(shape)
    return tensors
