"""Binary containers for compressed tensors.

``.tsvd`` layout (all little-endian)::

    b"TSVD"                     magic
    u16                         version
    u32 N, N x u32              original dims
    u32 M, M x u32              reshaped dims
    M x (J_m * J_m) f32         factor matrices, column-major
    u64 K                       kept core entries
    K x f32                     values, largest magnitude first
    K x u64                     column-major core positions
    f64                         total energy

A second container, magic ``b"THSV"``, holds a truncated Tucker model
(dims, ranks, f32 factors, f32 core) for the t-HOSVD baseline.
"""

from __future__ import annotations

import struct
from math import prod
from pathlib import Path

import numpy as np

from .compression import CompressedTensor, SparseCore
from .hosvd import TuckerFactors
from .reshape import ReshapePlan
from .tensor import DenseTensor

__all__ = [
    "MAGIC",
    "TUCKER_MAGIC",
    "VERSION",
    "CodecError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedStreamError",
    "PositionOutOfRangeError",
    "ElementCountMismatchError",
    "encode",
    "decode",
    "encode_tucker",
    "decode_tucker",
    "decode_any",
    "header_size",
    "encoded_size",
    "save",
    "load",
]

MAGIC = b"TSVD"
TUCKER_MAGIC = b"THSV"
VERSION = 1


class CodecError(ValueError):
    pass


class BadMagicError(CodecError):
    pass


class UnsupportedVersionError(CodecError):
    pass


class TruncatedStreamError(CodecError):
    pass


class PositionOutOfRangeError(CodecError):
    pass


class ElementCountMismatchError(CodecError):
    pass


def header_size(original_order: int, reshaped_order: int) -> int:
    return 4 + 2 + 4 + 4 * original_order + 4 + 4 * reshaped_order


def encoded_size(c: CompressedTensor) -> int:
    k = len(c.sparse_core)
    return (
        header_size(len(c.plan.original_dims), c.plan.order)
        + 4 * sum(j * j for j in c.plan.reshaped_dims)
        + 8
        + 12 * k
        + 8
    )


def _dims_block(dims) -> bytes:
    return struct.pack(f"<I{len(dims)}I", len(dims), *dims)


def _f32(a) -> bytes:
    return np.asarray(a, dtype="<f4").tobytes(order="F")


def encode(c: CompressedTensor) -> bytes:
    parts = [
        MAGIC,
        struct.pack("<H", VERSION),
        _dims_block(c.plan.original_dims),
        _dims_block(c.plan.reshaped_dims),
    ]
    parts.extend(_f32(u) for u in c.factors)
    sc = c.sparse_core
    parts.append(struct.pack("<Q", len(sc)))
    parts.append(_f32(sc.values))
    parts.append(np.asarray(sc.positions, dtype="<u8").tobytes())
    parts.append(struct.pack("<d", c.total_energy))
    return b"".join(parts)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = memoryview(buf)
        self.pos = 0

    def take(self, n: int, what: str) -> memoryview:
        end = self.pos + n
        if end > len(self.buf):
            raise TruncatedStreamError(
                f"stream truncated in {what}: need {end} bytes, have {len(self.buf)}"
            )
        chunk = self.buf[self.pos : end]
        self.pos = end
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(itemsize * count, what), dtype=dtype, count=count)

    def dims(self, what: str) -> tuple[int, ...]:
        (n,) = self.unpack("<I", what)
        if n == 0:
            raise CodecError(f"{what}: order must be at least 1")
        dims = self.unpack(f"<{n}I", what)
        if any(d == 0 for d in dims):
            raise CodecError(f"{what}: zero-sized dimension in {dims}")
        return dims


def _check_preamble(r: _Reader, magic: bytes) -> None:
    got = bytes(r.take(4, "magic"))
    if got != magic:
        raise BadMagicError(f"bad magic {got!r}, expected {magic!r}")
    (version,) = r.unpack("<H", "version")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}")


def decode(data: bytes) -> CompressedTensor:
    r = _Reader(data)
    _check_preamble(r, MAGIC)
    original = r.dims("original dims")
    reshaped = r.dims("reshaped dims")
    if prod(original) != prod(reshaped):
        raise ElementCountMismatchError(
            f"original dims {original} hold {prod(original)} elements, "
            f"reshaped dims {reshaped} hold {prod(reshaped)}"
        )
    factors = []
    for m, j in enumerate(reshaped):
        flat = r.array("<f4", j * j, f"factor {m}")
        factors.append(flat.astype(np.float64).reshape((j, j), order="F"))
    (k,) = r.unpack("<Q", "entry count")
    size = prod(reshaped)
    if k > size:
        raise CodecError(f"entry count {k} exceeds core size {size}")
    values = r.array("<f4", k, "core values").astype(np.float64)
    positions = r.array("<u8", k, "core positions")
    if k and positions.max() >= size:
        raise PositionOutOfRangeError(
            f"core position {int(positions.max())} out of range for core size {size}"
        )
    if np.unique(positions).size != k:
        raise CodecError("duplicate core positions")
    (energy,) = r.unpack("<d", "total energy")
    if r.pos != len(r.buf):
        raise CodecError(f"{len(r.buf) - r.pos} trailing bytes after payload")
    plan = ReshapePlan(original, reshaped, degenerate=len(reshaped) == 1)
    return CompressedTensor(
        plan, tuple(factors), SparseCore(positions.astype(np.int64), values), energy
    )


def encode_tucker(f: TuckerFactors) -> bytes:
    dims, ranks = f.dims, f.ranks
    parts = [
        TUCKER_MAGIC,
        struct.pack("<H", VERSION),
        _dims_block(dims),
        struct.pack(f"<{len(ranks)}I", *ranks),
    ]
    parts.extend(_f32(u) for u in f.factors)
    parts.append(_f32(f.core.data))
    return b"".join(parts)


def decode_tucker(data: bytes) -> TuckerFactors:
    r = _Reader(data)
    _check_preamble(r, TUCKER_MAGIC)
    dims = r.dims("dims")
    ranks = r.unpack(f"<{len(dims)}I", "ranks")
    if any(not 1 <= rk <= d for rk, d in zip(ranks, dims)):
        raise CodecError(f"ranks {ranks} invalid for dims {dims}")
    factors = []
    for n, (d, rk) in enumerate(zip(dims, ranks)):
        flat = r.array("<f4", d * rk, f"factor {n}")
        factors.append(flat.astype(np.float64).reshape((d, rk), order="F"))
    core = r.array("<f4", prod(ranks), "core").astype(np.float64)
    if r.pos != len(r.buf):
        raise CodecError(f"{len(r.buf) - r.pos} trailing bytes after payload")
    return TuckerFactors(tuple(factors), DenseTensor(core, ranks))


def decode_any(data: bytes):
    """Decode either container, dispatching on the magic bytes."""
    if bytes(data[:4]) == TUCKER_MAGIC:
        return decode_tucker(data)
    return decode(data)


def save(obj, path) -> int:
    """Write a CompressedTensor or TuckerFactors; returns the byte count."""
    if isinstance(obj, TuckerFactors):
        payload = encode_tucker(obj)
    else:
        payload = encode(obj)
    Path(path).write_bytes(payload)
    return len(payload)


def load(path):
    return decode_any(Path(path).read_bytes())
