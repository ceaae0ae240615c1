"""Binary tensor container used by the command-line tools.

Layout (all integers little-endian)::

    b"TTEN"            magic
    u32 version        currently 1
    u8  dtype          0 = float64, 1 = complex128
    u32 order N        number of tubal modes
    u64 dims[N + 1]    sizes, the last one is the tubal length p
    payload            values, first index fastest, tubal index slowest
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"TTEN"
VERSION = 1
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<c16")}
_HEADER = struct.Struct("<4sIBI")


class TensorFileError(ValueError):
    """Malformed or unsupported tensor file."""


def encode(data) -> bytes:
    """Serialize an array whose last axis is the tubal axis."""
    data = np.asarray(data)
    if data.ndim < 1:
        raise TensorFileError("need at least the tubal axis")
    code = 1 if np.iscomplexobj(data) else 0
    arr = data.astype(_DTYPES[code], copy=False)
    dims = struct.pack(f"<{data.ndim}Q", *data.shape)
    return _HEADER.pack(MAGIC, VERSION, code, data.ndim - 1) + dims + arr.tobytes(order="F")


def decode(buf: bytes) -> np.ndarray:
    if len(buf) < _HEADER.size:
        raise TensorFileError("truncated header")
    magic, version, code, order = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise TensorFileError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TensorFileError(f"unsupported version {version}")
    if code not in _DTYPES:
        raise TensorFileError(f"unknown dtype code {code}")
    off = _HEADER.size
    ndims = order + 1
    if len(buf) < off + 8 * ndims:
        raise TensorFileError("truncated dimension list")
    dims = struct.unpack_from(f"<{ndims}Q", buf, off)
    off += 8 * ndims
    dtype = _DTYPES[code]
    count = int(np.prod(dims, dtype=object))
    if len(buf) - off != count * dtype.itemsize:
        raise TensorFileError(f"payload has {len(buf) - off} bytes, expected {count * dtype.itemsize}")
    flat = np.frombuffer(buf, dtype=dtype, count=count, offset=off)
    return flat.reshape(dims, order="F").astype(dtype.newbyteorder("="))


def write(path, data) -> None:
    Path(path).write_bytes(encode(data))


def read(path) -> np.ndarray:
    return decode(Path(path).read_bytes())
