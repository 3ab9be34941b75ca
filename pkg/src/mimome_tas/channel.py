"""Rayleigh channel generation, column selection and matrix files.

Channel matrices are plain ``complex128`` numpy arrays of shape
``(receive antennas, transmit antennas)``; transmit antennas are columns.
Generated matrices are returned read-only.

Random numbers come from numpy's Philox4x64 counter-based bit generator keyed
directly with the 64-bit seed (counter starting at zero). Each entry consumes
two raw 64-bit words ``(w1, w2)`` which are turned into uniforms in ``(0, 1]``
with ``u = ((w >> 11) + 1) * 2**-53`` and mapped through the polar form of
Box-Muller, ``sqrt(-ln u1) * exp(2j*pi*u2)``. That gives a circularly
symmetric CN(0, 1) entry whose real and imaginary parts each have variance 1/2.
Entries are filled in row-major order.
"""
from __future__ import annotations

import math
import os
import struct
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import DimensionError, FormatError, SelectionError

ChannelMatrix = NDArray[np.complex128]

TEXT_MAGIC = "MIMOME-MAT"
BINARY_MAGIC = b"MIMOMEB1"
FORMAT_VERSION = "v1"
_BIN_HEADER = struct.Struct("<8sII")

_MASK64 = (1 << 64) - 1


def as_channel(H, name: str = "H") -> ChannelMatrix:
    """Validate and coerce ``H`` to a finite 2-D complex128 array."""
    arr = np.asarray(H, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains non-finite entries")
    return arr


def generate_rayleigh(rows: int, cols: int, seed: int) -> ChannelMatrix:
    """Draw an i.i.d. CN(0, 1) matrix, reproducible from ``seed``."""
    if rows < 1 or cols < 1:
        raise DimensionError(f"channel dimensions must be positive, got {rows}x{cols}")
    n = rows * cols
    raw = np.random.Philox(key=int(seed) & _MASK64).random_raw(2 * n)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    radius = np.sqrt(-np.log(u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    H = (radius * np.cos(angle) + 1j * radius * np.sin(angle)).reshape(rows, cols)
    H.flags.writeable = False
    return H


def select_columns(H: ChannelMatrix, indices: Sequence[int]) -> ChannelMatrix:
    """Return the columns named by 1-based, strictly increasing ``indices``."""
    H = np.asarray(H)
    idx = [int(i) for i in indices]
    if not idx:
        raise SelectionError("empty antenna index list")
    for prev, cur in zip(idx, idx[1:]):
        if cur <= prev:
            raise SelectionError(f"indices must be strictly increasing, got {idx}")
    if idx[0] < 1 or idx[-1] > H.shape[1]:
        raise SelectionError(f"indices {idx} out of range 1..{H.shape[1]}")
    return H[:, [i - 1 for i in idx]]


def store_matrix(H: ChannelMatrix, path: str | os.PathLike, binary: bool = False) -> None:
    H = as_channel(H)
    rows, cols = H.shape
    path = Path(path)
    if binary:
        payload = np.empty((rows * cols, 2), dtype="<f8")
        flat = H.reshape(-1)
        payload[:, 0] = flat.real
        payload[:, 1] = flat.imag
        with open(path, "wb") as fh:
            fh.write(_BIN_HEADER.pack(BINARY_MAGIC, rows, cols))
            fh.write(payload.tobytes())
        return
    lines = [f"{TEXT_MAGIC} {FORMAT_VERSION} {rows} {cols}"]
    lines.extend(f"{z.real!r} {z.imag!r}" for z in H.reshape(-1).tolist())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_matrix(path: str | os.PathLike) -> ChannelMatrix:
    """Load a text or binary matrix file, detecting the variant from its magic."""
    data = Path(path).read_bytes()
    if data[:8] == BINARY_MAGIC:
        H = _parse_binary(data)
    else:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{path}: not a matrix file") from exc
        H = _parse_text(text)
    if not np.all(np.isfinite(H)):
        raise FormatError(f"{path}: non-finite value in matrix payload")
    H.flags.writeable = False
    return H


def _parse_header_dims(rows: int, cols: int) -> None:
    if rows < 1 or cols < 1:
        raise FormatError(f"bad matrix dimensions {rows}x{cols}")


def _parse_binary(data: bytes) -> ChannelMatrix:
    if len(data) < _BIN_HEADER.size:
        raise FormatError("truncated binary header")
    _, rows, cols = _BIN_HEADER.unpack_from(data)
    _parse_header_dims(rows, cols)
    expected = rows * cols * 16
    body = data[_BIN_HEADER.size:]
    if len(body) != expected:
        raise FormatError(f"binary payload is {len(body)} bytes, expected {expected}")
    pairs = np.frombuffer(body, dtype="<f8").reshape(rows * cols, 2)
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols)


def _parse_text(text: str) -> ChannelMatrix:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty matrix file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != TEXT_MAGIC or header[1] != FORMAT_VERSION:
        raise FormatError(f"malformed header {lines[0]!r}")
    try:
        rows, cols = int(header[2]), int(header[3])
    except ValueError as exc:
        raise FormatError(f"malformed header {lines[0]!r}") from exc
    _parse_header_dims(rows, cols)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != rows * cols:
        raise FormatError(f"expected {rows * cols} entries, found {len(body)}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"line {i + 2}: expected '<re> <im>'")
        try:
            re, im = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise FormatError(f"line {i + 2}: {exc}") from exc
        if not (math.isfinite(re) and math.isfinite(im)):
            raise FormatError(f"line {i + 2}: non-finite value")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)
