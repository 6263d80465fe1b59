"""Scalable coded-stream container (.nsc).

Layout (integers little-endian)::

    magic        4 bytes  "NESC"
    version      u8       1
    sample_rate  u32
    layers       u8       1..3
    packet_count u32
    payload      packet-major: per packet, ``layers`` indices of 10 bits
                 each, MSB-first, concatenated across packets and
                 zero-padded to a byte boundary at the end only

Each packet therefore costs layers*10 bits: 1 kbps per layer at the
codec's 100 packets/s. Dropping trailing layers of every packet yields
a valid lower-rate stream; :func:`truncate_layers` repacks accordingly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    BadMagicError,
    InvalidLayersError,
    PayloadLengthError,
    UnsupportedVersionError,
)

MAGIC = b"NESC"
VERSION = 1
BITS_PER_INDEX = 10
MAX_LAYERS = 3
HEADER_BYTES = 14


@dataclass(frozen=True)
class BitstreamHeader:
    sample_rate_hz: int
    layers: int
    packet_count: int

    @property
    def payload_bytes(self) -> int:
        bits = self.packet_count * self.layers * BITS_PER_INDEX
        return (bits + 7) // 8


class _BitWriter:
    def __init__(self):
        self._bytes = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        self._acc = (self._acc << nbits) | value
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            self._bytes.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def finish(self) -> bytes:
        if self._nbits:
            self._bytes.append((self._acc << (8 - self._nbits)) & 0xFF)
            self._acc = 0
            self._nbits = 0
        return bytes(self._bytes)


class _BitReader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def read(self, nbits: int) -> int:
        out = 0
        for _ in range(nbits):
            byte = self._data[self._pos >> 3]
            out = (out << 1) | ((byte >> (7 - (self._pos & 7))) & 1)
            self._pos += 1
        return out


def pack(codes: Sequence[tuple], layers: int, sample_rate_hz: int = 16000) -> bytes:
    """Serialize packet codes, keeping the first ``layers`` indices of each."""
    if not 1 <= layers <= MAX_LAYERS:
        raise InvalidLayersError(f"layers must be in [1, {MAX_LAYERS}], got {layers}")
    writer = _BitWriter()
    for i, packet in enumerate(codes):
        if len(packet) < layers:
            raise ValueError(f"packet {i} has {len(packet)} indices, need >= {layers}")
        for idx in packet[:layers]:
            if not 0 <= idx < (1 << BITS_PER_INDEX):
                raise ValueError(f"packet {i}: index {idx} does not fit in 10 bits")
            writer.write(int(idx), BITS_PER_INDEX)
    header = MAGIC + struct.pack("<BIBI", VERSION, sample_rate_hz, layers, len(codes))
    return header + writer.finish()


def unpack(data: bytes) -> tuple[BitstreamHeader, list[tuple]]:
    """Parse a coded stream back into its header and packet codes."""
    if len(data) < HEADER_BYTES:
        raise PayloadLengthError(f"stream too short ({len(data)} bytes) for a header")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}")
    version, rate, layers, count = struct.unpack_from("<BIBI", data, 4)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported stream version {version}")
    if not 1 <= layers <= MAX_LAYERS:
        raise InvalidLayersError(f"header layers {layers} outside [1, {MAX_LAYERS}]")
    header = BitstreamHeader(sample_rate_hz=rate, layers=layers, packet_count=count)
    payload = data[HEADER_BYTES:]
    if len(payload) != header.payload_bytes:
        raise PayloadLengthError(
            f"payload is {len(payload)} bytes, header implies {header.payload_bytes}"
        )
    reader = _BitReader(payload)
    codes = [
        tuple(reader.read(BITS_PER_INDEX) for _ in range(layers))
        for _ in range(count)
    ]
    return header, codes


def truncate_layers(data: bytes, new_layers: int) -> bytes:
    """Repack a stream keeping only the first ``new_layers`` indices per packet."""
    header, codes = unpack(data)
    if new_layers > header.layers:
        raise InvalidLayersError(
            f"cannot truncate to {new_layers} layers, stream has {header.layers}"
        )
    if not 1 <= new_layers <= MAX_LAYERS:
        raise InvalidLayersError(f"new_layers must be in [1, {MAX_LAYERS}]")
    return pack(codes, new_layers, sample_rate_hz=header.sample_rate_hz)
