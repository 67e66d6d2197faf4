"""Minimal binary PGM (P5) reader/writer for masks and soft maps.

Masks are maxval-255 files whose samples must be exactly 0 (background) or
255 (foreground). Soft maps are maxval-65535 files with big-endian 16-bit
samples, decoded as value/65535. The writer emits the canonical header
"P5\\n<w> <h>\\n<maxval>\\n" so output bytes are deterministic.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InvalidMaskValue, MalformedHeader, UnsupportedMaxval
from .masks import BinaryMask, SoftMask

MASK_MAXVAL = 255
SOFT_MAXVAL = 65535

_WHITESPACE = b" \t\n\r\x0b\x0c"


def write_pgm(grid: BinaryMask | SoftMask, path) -> None:
    """Write a mask or soft map as binary PGM with the canonical header."""
    if isinstance(grid, BinaryMask):
        maxval = MASK_MAXVAL
        payload = (grid.data * np.uint8(255)).tobytes()
    elif isinstance(grid, SoftMask):
        maxval = SOFT_MAXVAL
        payload = np.round(grid.data * SOFT_MAXVAL).astype(">u2").tobytes()
    else:
        raise TypeError(f"expected BinaryMask or SoftMask, got {type(grid).__name__}")
    header = f"P5\n{grid.width} {grid.height}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + payload)


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    n = len(buf)
    while pos < n:
        ch = buf[pos : pos + 1]
        if ch == b"#":
            while pos < n and buf[pos : pos + 1] != b"\n":
                pos += 1
        elif ch in _WHITESPACE:
            pos += 1
        else:
            break
    if pos >= n:
        raise MalformedHeader("unexpected end of file in header")
    start = pos
    while pos < n and buf[pos : pos + 1] not in _WHITESPACE and buf[pos : pos + 1] != b"#":
        pos += 1
    return buf[start:pos], pos


def _int_token(buf: bytes, pos: int, what: str) -> tuple[int, int]:
    token, pos = _next_token(buf, pos)
    try:
        value = int(token)
    except ValueError as exc:
        raise MalformedHeader(f"{what} is not an integer: {token!r}") from exc
    if value <= 0:
        raise MalformedHeader(f"{what} must be positive, got {value}")
    return value, pos


def read_pgm(path) -> BinaryMask | SoftMask:
    """Read a binary PGM; maxval selects BinaryMask (255) or SoftMask (65535).

    File-system failures propagate as OSError. Header problems raise
    MalformedHeader; mask files containing samples other than 0/255 raise
    InvalidMaskValue; any other maxval raises UnsupportedMaxval.
    """
    buf = Path(path).read_bytes()
    magic, pos = _next_token(buf, 0)
    if magic != b"P5":
        raise MalformedHeader(f"not a binary PGM (magic {magic!r})")
    width, pos = _int_token(buf, pos, "width")
    height, pos = _int_token(buf, pos, "height")
    maxval, pos = _int_token(buf, pos, "maxval")
    # exactly one whitespace byte separates the maxval from the raster
    if pos >= len(buf) or buf[pos : pos + 1] not in _WHITESPACE:
        raise MalformedHeader("missing whitespace after maxval")
    pos += 1

    if maxval == MASK_MAXVAL:
        expected = width * height
        raw = buf[pos : pos + expected]
        if len(raw) < expected:
            raise MalformedHeader(f"truncated pixel data: {len(raw)} of {expected} bytes")
        arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
        bad = (arr != 0) & (arr != 255)
        if bad.any():
            offender = int(arr[bad][0])
            raise InvalidMaskValue(f"mask sample {offender} is neither 0 nor 255")
        return BinaryMask(arr // 255)
    if maxval == SOFT_MAXVAL:
        expected = 2 * width * height
        raw = buf[pos : pos + expected]
        if len(raw) < expected:
            raise MalformedHeader(f"truncated pixel data: {len(raw)} of {expected} bytes")
        arr = np.frombuffer(raw, dtype=">u2").reshape(height, width)
        return SoftMask(arr.astype(float) / SOFT_MAXVAL)
    raise UnsupportedMaxval(f"maxval {maxval} not supported (use 255 or 65535)")
