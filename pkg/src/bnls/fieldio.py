"""Binary field container shared by the library and the CLI.

Layout: a 64-byte little-endian header followed by the samples as
interleaved re/im float64 in row-major order.

    bytes  0..7    magic  b"BNLSFLD1"
    bytes  8..11   uint32 format version (1)
    bytes 12..15   uint32 dim
    bytes 16..23   uint32 x2 points per axis (second entry 0 when dim=1)
    bytes 24..27   uint32 space flag (0 physical, 1 fourier)
    bytes 28..31   uint32 reserved
    bytes 32..47   float64 x2 extent per axis (second entry 0 when dim=1)
    bytes 48..63   reserved
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .spectral import FOURIER, PHYSICAL, Field, make_grid

MAGIC = b"BNLSFLD1"
VERSION = 1
_HEADER = struct.Struct("<8sIIIIIIdd16x")

assert _HEADER.size == 64


def write_field(path, f: Field) -> None:
    n = list(f.grid.points) + [0]
    L = list(f.grid.extent) + [0.0]
    header = _HEADER.pack(
        MAGIC, VERSION, f.grid.dim, n[0], n[1],
        0 if f.space == PHYSICAL else 1, 0, L[0], L[1],
    )
    flat = np.ascontiguousarray(f.values).ravel()
    data = np.empty(2 * flat.size, dtype="<f8")
    data[0::2] = flat.real
    data[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_field(path) -> Field:
    raw = Path(path).read_bytes()
    if len(raw) < 64:
        raise ValueError(f"{path}: truncated field file")
    magic, version, dim, n0, n1, space, _, l0, l1 = _HEADER.unpack(raw[:64])
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    points = (n0,) if dim == 1 else (n0, n1)
    extent = (l0,) if dim == 1 else (l0, l1)
    grid = make_grid(dim, extent, points)
    data = np.frombuffer(raw, dtype="<f8", offset=64)
    if data.size != 2 * grid.size:
        raise ValueError(f"{path}: payload size mismatch")
    values = (data[0::2] + 1j * data[1::2]).reshape(grid.shape)
    return Field(grid, values, PHYSICAL if space == 0 else FOURIER)


__all__ = ["read_field", "write_field", "MAGIC", "VERSION"]
