"""Binary and soft segmentation masks plus raster operations on them.

Pixel-center convention: pixel (column i, row j) has continuous center
(i, j). Mask data is stored row-major with shape (height, width).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ellipse import Ellipse, quadratic_form
from .errors import DimensionMismatch, EmptyMask


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Row-major {0, 1} label grid of shape (height, width)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError(f"mask data must be 2-D, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            arr = arr.astype(np.uint8)
        if arr.size and int(arr.max()) > 1:
            raise ValueError("mask values must be 0 or 1")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def count(self) -> int:
        """Number of foreground pixels."""
        return int(self.data.sum())


@dataclass(frozen=True, eq=False)
class SoftMask:
    """Row-major foreground-probability grid in [0, 1], shape (height, width)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"soft map data must be 2-D, got shape {arr.shape}")
        if arr.size and (not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("soft map values must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


def rasterize_ellipse(e: Ellipse, width: int, height: int) -> BinaryMask:
    """Rasterize an ellipse: pixel (i, j) is foreground iff Q(i, j) <= 1.

    Regions outside the grid are clipped; an ellipse fully off-grid yields
    an all-background mask.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"grid dimensions must be positive, got {width}x{height}")
    data = np.zeros((height, width), dtype=np.uint8)
    c = math.cos(e.theta)
    s = math.sin(e.theta)
    ex = math.sqrt((e.a * c) ** 2 + (e.b * s) ** 2)
    ey = math.sqrt((e.a * s) ** 2 + (e.b * c) ** 2)
    i0 = max(0, math.ceil(e.cx - ex))
    i1 = min(width - 1, math.floor(e.cx + ex))
    j0 = max(0, math.ceil(e.cy - ey))
    j1 = min(height - 1, math.floor(e.cy + ey))
    if i0 > i1 or j0 > j1:
        return BinaryMask(data)
    xs = np.arange(i0, i1 + 1, dtype=float)
    ys = np.arange(j0, j1 + 1, dtype=float)
    q = quadratic_form(e, xs[None, :], ys[:, None])
    data[j0 : j1 + 1, i0 : i1 + 1] = q <= 1.0
    return BinaryMask(data)


def extract_contour(mask: BinaryMask) -> np.ndarray:
    """Boundary pixel centers of a mask as an (n, 2) array of (x, y).

    A foreground pixel is on the boundary when at least one 4-neighbor is
    background or lies outside the grid. Points come out in row-major scan
    order, which makes the result deterministic.
    """
    fg = mask.data.astype(bool)
    if not fg.any():
        raise EmptyMask("mask has no foreground pixels")
    rows = np.flatnonzero(fg.any(axis=1))
    cols = np.flatnonzero(fg.any(axis=0))
    j0, j1 = int(rows[0]), int(rows[-1])
    i0, i1 = int(cols[0]), int(cols[-1])
    sub = fg[j0 : j1 + 1, i0 : i1 + 1]
    padded = np.pad(sub, 1)
    interior = (
        padded[:-2, 1:-1]
        & padded[2:, 1:-1]
        & padded[1:-1, :-2]
        & padded[1:-1, 2:]
    )
    jj, ii = np.nonzero(sub & ~interior)
    return np.column_stack([(ii + i0).astype(float), (jj + j0).astype(float)])


def _check_same_dims(masks) -> None:
    first = masks[0]
    for m in masks[1:]:
        if m.data.shape != first.data.shape:
            raise DimensionMismatch(
                f"mask dimensions differ: {m.data.shape} vs {first.data.shape}"
            )


def union_mask(masks) -> BinaryMask:
    """Pixel-wise OR of a nonempty list of equally sized masks."""
    if not masks:
        raise ValueError("union of zero masks")
    _check_same_dims(masks)
    out = masks[0].data.astype(bool).copy()
    for m in masks[1:]:
        np.logical_or(out, m.data, out=out)
    return BinaryMask(out)


def intersect_mask(masks) -> BinaryMask:
    """Pixel-wise AND of a nonempty list of equally sized masks."""
    if not masks:
        raise ValueError("intersection of zero masks")
    _check_same_dims(masks)
    out = masks[0].data.astype(bool).copy()
    for m in masks[1:]:
        np.logical_and(out, m.data, out=out)
    return BinaryMask(out)
