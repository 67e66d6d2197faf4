"""Per-case variance scores for a set of plausible segmentations.

Four scalar scores, all oriented so that larger means less agreement or
confidence among the samples: spread of the fitted ellipse parameters, ring
area between the union-fit and intersection-fit ellipses, entropy of the
mean binary mask, and entropy of the mean per-pixel softmax confidence.
Raw scores are min-max normalized over a cohort before thresholding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .biometry import Bounds
from .ellipse import circular_orientation_mean, wrap_orientation_difference
from .errors import DimensionMismatch, EmptyList, InsufficientSamples

#: wire names of the scores, in canonical column order
SCORE_NAMES = ("h1", "h2", "h3", "h4")

_WIRE_TO_FIELD = {
    "h1": "param_variance",
    "h2": "ring_area_mm2",
    "h3": "mask_entropy",
    "h4": "confidence_entropy",
}


def ellipse_parameter_variance(ellipses) -> float:
    """Sum of per-parameter population variances over fitted ellipses.

    Mixes units (px^2 for center/axes, rad^2 for the orientation) exactly as
    a plain parameter-vector variance does; rankings are taken after cohort
    normalization so the mixing is harmless. The orientation variance uses
    deviations from the circular mean wrapped into (-pi/2, pi/2].
    """
    if len(ellipses) < 2:
        raise InsufficientSamples(f"variance needs at least 2 ellipses, got {len(ellipses)}")
    params = np.array([[e.cx, e.cy, e.a, e.b] for e in ellipses])
    thetas = np.array([e.theta for e in ellipses])
    linear = float(np.var(params, axis=0).sum())
    deviations = wrap_orientation_difference(thetas - circular_orientation_mean(thetas))
    return linear + float(np.var(deviations))


def ring_area_score(bounds: Bounds, pixel_size_mm: float) -> float:
    """Area in mm^2 between the outer (union) and inner (intersection) fits.

    Fallback bounds have no ring ellipses; those cases score the pixel-count
    difference of union and intersection, scaled to mm^2. Clamped at 0.
    """
    if pixel_size_mm <= 0:
        raise ValueError(f"pixel size must be positive, got {pixel_size_mm}")
    s2 = pixel_size_mm * pixel_size_mm
    if bounds.fallback_used or bounds.inner is None or bounds.outer is None:
        return max(0.0, (bounds.union_px - bounds.intersection_px) * s2)
    ring = math.pi * (bounds.outer.a * bounds.outer.b - bounds.inner.a * bounds.inner.b)
    return max(0.0, ring * s2)


def mask_entropy_score(masks) -> float:
    """Entropy (nats) of the per-pixel foreground frequency across masks.

    Sums -p log p over pixels with p the fraction of samples labeling the
    pixel foreground (0 log 0 := 0). Zero iff all masks agree everywhere;
    bounded above by K/e for K pixels.
    """
    if len(masks) < 2:
        raise InsufficientSamples(f"mask entropy needs at least 2 masks, got {len(masks)}")
    shape = masks[0].data.shape
    for m in masks[1:]:
        if m.data.shape != shape:
            raise DimensionMismatch(f"mask dimensions differ: {m.data.shape} vs {shape}")
    pbar = np.mean([m.data for m in masks], axis=0, dtype=float)
    nz = pbar > 0.0
    terms = np.zeros_like(pbar)
    terms[nz] = -pbar[nz] * np.log(pbar[nz])
    return float(terms.sum())


def confidence_entropy_score(softmaps) -> float:
    """Entropy (nats) of the mean per-pixel two-class confidence.

    Per sample and pixel the confidence is max(p, 1 - p); the mean over
    samples lies in [0.5, 1], and the score sums -c log c over pixels. Zero
    for hard (0/1) maps.
    """
    if not softmaps:
        raise ValueError("confidence entropy needs at least one soft map")
    shape = softmaps[0].data.shape
    for sm in softmaps[1:]:
        if sm.data.shape != shape:
            raise DimensionMismatch(f"soft map dimensions differ: {sm.data.shape} vs {shape}")
    cbar = np.mean([np.maximum(sm.data, 1.0 - sm.data) for sm in softmaps], axis=0)
    return float((-cbar * np.log(cbar)).sum())


@dataclass(frozen=True)
class NormalizationRecord:
    """Cohort min/max retained to scale held-out raw scores into [0, 1]."""

    minimum: float
    maximum: float

    def __post_init__(self) -> None:
        if self.minimum > self.maximum:
            raise ValueError(f"min {self.minimum} exceeds max {self.maximum}")

    def apply(self, value: float) -> float:
        if self.maximum == self.minimum:
            return 0.0
        scaled = (value - self.minimum) / (self.maximum - self.minimum)
        return min(1.0, max(0.0, scaled))


def normalize_scores(values) -> tuple[list[float], NormalizationRecord]:
    """Min-max scale raw scores into [0, 1]; a constant cohort maps to 0."""
    values = list(values)
    if not values:
        raise EmptyList("cannot normalize zero scores")
    vmin = float(min(values))
    vmax = float(max(values))
    record = NormalizationRecord(vmin, vmax)
    if vmax == vmin:
        return [0.0] * len(values), record
    return [(float(v) - vmin) / (vmax - vmin) for v in values], record


@dataclass(frozen=True)
class VarianceScores:
    """Raw per-case robustness scores; None marks an unavailable score."""

    param_variance: float | None  # px^2 + rad^2, mixed units
    ring_area_mm2: float | None
    mask_entropy: float | None  # nats
    confidence_entropy: float | None  # nats; None without soft maps

    def get(self, name: str) -> float | None:
        """Look a score up by its wire name (h1..h4)."""
        try:
            return getattr(self, _WIRE_TO_FIELD[name])
        except KeyError:
            raise KeyError(f"unknown score name {name!r}") from None

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, field) for name, field in _WIRE_TO_FIELD.items()}


def variance_scores(ss, bounds: Bounds | None, pixel_size_mm: float) -> VarianceScores:
    """Compute every score available for a sample set."""
    fits = ss.surviving_fits()
    return VarianceScores(
        param_variance=ellipse_parameter_variance(fits) if len(fits) >= 2 else None,
        ring_area_mm2=ring_area_score(bounds, pixel_size_mm) if bounds is not None else None,
        mask_entropy=mask_entropy_score(ss.masks) if ss.n >= 2 else None,
        confidence_entropy=confidence_entropy_score(ss.soft) if ss.soft else None,
    )


def score_field(name: str) -> str:
    """Map a wire name (h1..h4) to the VarianceScores field name."""
    if name not in _WIRE_TO_FIELD:
        raise KeyError(f"unknown score name {name!r}")
    return _WIRE_TO_FIELD[name]
