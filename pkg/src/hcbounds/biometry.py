"""Head-circumference biometry from fitted ellipses.

Covers the circumference formula and its quadrature oracle, aggregation of
an ensemble of fitted ellipses into point estimates, and upper/lower bound
construction from the union and intersection of the sample masks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ellipse import (
    Ellipse,
    circular_orientation_mean,
    fit_ellipse,
    wrap_orientation_difference,
)
from .errors import (
    AllFitsFailed,
    DegenerateConfiguration,
    DimensionMismatch,
    EmptyList,
    EmptyMask,
    InsufficientSamples,
    NoConvergence,
    TooFewPoints,
)
from .masks import BinaryMask, SoftMask, extract_contour, intersect_mask, union_mask

_QUAD_MAX_LEVELS = 30


def hc_ramanujan(e: Ellipse, pixel_size_mm: float) -> float:
    """Ellipse circumference in mm via the Ramanujan II approximation.

    HC = pi (a + b) (1 + 3h / (10 + sqrt(4 - 3h))) * s with
    h = ((a - b) / (a + b))^2. The approximation error is O(h^10), which is
    negligible for near-circular head contours; for a == b the value is
    exactly 2 pi a s.
    """
    if pixel_size_mm <= 0:
        raise ValueError(f"pixel size must be positive, got {pixel_size_mm}")
    h = ((e.a - e.b) / (e.a + e.b)) ** 2
    return (
        math.pi
        * (e.a + e.b)
        * (1.0 + 3.0 * h / (10.0 + math.sqrt(4.0 - 3.0 * h)))
        * pixel_size_mm
    )


def perimeter_quadrature(e: Ellipse, pixel_size_mm: float, rel_tol: float) -> float:
    """Arc-length quadrature of the ellipse circumference, in mm.

    Integrates sqrt(a^2 sin^2 t + b^2 cos^2 t) over [0, 2 pi] by composite
    Simpson rule, bisecting every interval until two successive estimates
    agree to ``rel_tol`` relatively. Serves as the independent oracle for
    :func:`hc_ramanujan`.
    """
    if pixel_size_mm <= 0:
        raise ValueError(f"pixel size must be positive, got {pixel_size_mm}")
    if not 0.0 < rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in (0, 1e-3], got {rel_tol}")

    a, b = e.a, e.b

    def simpson(n: int) -> float:
        t = np.linspace(0.0, 2.0 * math.pi, n + 1)
        f = np.hypot(a * np.sin(t), b * np.cos(t))
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return float((2.0 * math.pi / n) / 3.0 * (w @ f))

    n = 8
    prev = simpson(n)
    for _ in range(_QUAD_MAX_LEVELS):
        n *= 2
        cur = simpson(n)
        if abs(cur - prev) < rel_tol * abs(cur):
            return cur * pixel_size_mm
        prev = cur
    raise NoConvergence(f"quadrature did not reach rel_tol={rel_tol} in {_QUAD_MAX_LEVELS} levels")


def aggregate_ellipses(ellipses, mode: str = "median") -> Ellipse:
    """Component-wise mean or median of a nonempty list of ellipses.

    (cx, cy, a, b) aggregate linearly; the orientation is pi-periodic and is
    aggregated circularly on doubled angles. For the median, orientations are
    reduced to deviations from the circular mean wrapped into (-pi/2, pi/2],
    the median deviation is added back, and the result is re-canonicalized.
    """
    if not ellipses:
        raise EmptyList("cannot aggregate zero ellipses")
    if mode not in ("mean", "median"):
        raise ValueError(f"mode must be 'mean' or 'median', got {mode!r}")
    params = np.array([[e.cx, e.cy, e.a, e.b] for e in ellipses])
    thetas = np.array([e.theta for e in ellipses])
    theta_mean = circular_orientation_mean(thetas)
    if mode == "mean":
        cx, cy, a, b = params.mean(axis=0)
        theta = theta_mean
    else:
        cx, cy, a, b = np.median(params, axis=0)
        deviations = wrap_orientation_difference(thetas - theta_mean)
        theta = theta_mean + float(np.median(deviations))
    return Ellipse.canonical(float(cx), float(cy), float(a), float(b), theta)


@dataclass
class SampleSet:
    """N plausible segmentations of one head.

    ``soft`` optionally carries matching soft probability maps. ``contours``
    optionally overrides the fit-time contour of each sample (used by the
    synthetic sector-dropout mode, where the stored mask stays filled but the
    fit sees a contour with a missing arc). ``fitted`` is populated lazily;
    entries are None for samples whose fit failed.
    """

    masks: list[BinaryMask]
    soft: list[SoftMask] | None = None
    contours: list[np.ndarray] | None = None
    fitted: list[Ellipse | None] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not self.masks:
            raise ValueError("sample set needs at least one mask")
        shape = self.masks[0].data.shape
        for m in self.masks[1:]:
            if m.data.shape != shape:
                raise DimensionMismatch(
                    f"sample mask dimensions differ: {m.data.shape} vs {shape}"
                )
        if self.soft is not None:
            if len(self.soft) != len(self.masks):
                raise ValueError("soft map count must match mask count")
            for sm in self.soft:
                if sm.data.shape != shape:
                    raise DimensionMismatch(
                        f"soft map dimensions differ: {sm.data.shape} vs {shape}"
                    )
        if self.contours is not None and len(self.contours) != len(self.masks):
            raise ValueError("contour override count must match mask count")

    @property
    def n(self) -> int:
        return len(self.masks)

    @property
    def width(self) -> int:
        return self.masks[0].width

    @property
    def height(self) -> int:
        return self.masks[0].height

    def ensure_fitted(self) -> list[Ellipse | None]:
        """Fit every sample once; failed fits are recorded as None."""
        if self.fitted is None:
            fitted: list[Ellipse | None] = []
            for i, mask in enumerate(self.masks):
                try:
                    if self.contours is not None:
                        points = self.contours[i]
                    else:
                        points = extract_contour(mask)
                    fitted.append(fit_ellipse(points))
                except (EmptyMask, TooFewPoints, DegenerateConfiguration):
                    fitted.append(None)
            self.fitted = fitted
        return self.fitted

    def surviving_fits(self) -> list[Ellipse]:
        return [e for e in self.ensure_fitted() if e is not None]


@dataclass(frozen=True)
class Bounds:
    """Lower/upper HC bounds for one case.

    ``inner``/``outer`` are the ellipses fitted to the intersection and the
    union of the sample masks (None when the fallback was taken). The pixel
    counts of union and intersection are kept so ring-area scoring works in
    the fallback path too.
    """

    lb_mm: float
    ub_mm: float
    inner: Ellipse | None
    outer: Ellipse | None
    fallback_used: bool
    union_px: int
    intersection_px: int

    def __post_init__(self) -> None:
        if self.lb_mm > self.ub_mm:
            raise ValueError(f"bounds inverted: lb={self.lb_mm} > ub={self.ub_mm}")


@dataclass(frozen=True)
class HcMeasurement:
    """Point estimates plus bounds for one case.

    ``n_samples`` counts the fits that survived; ``n_failed`` the skipped
    samples. ``bounds`` is None for single-sample cases.
    """

    hc_mean_mm: float
    hc_median_mm: float
    bounds: Bounds | None
    ellipse_mean: Ellipse
    ellipse_median: Ellipse
    n_samples: int
    n_failed: int = 0


def _try_fit_mask(mask: BinaryMask) -> Ellipse | None:
    try:
        return fit_ellipse(extract_contour(mask))
    except (EmptyMask, TooFewPoints, DegenerateConfiguration):
        return None


def bounds_from_samples(ss: SampleSet, pixel_size_mm: float) -> Bounds:
    """Upper/lower HC bounds from union/intersection ellipse fits.

    The upper bound is the HC of the ellipse fitted to the pixel-wise OR of
    the masks, the lower bound the HC of the fit to the pixel-wise AND. When
    the intersection is empty or either fit fails, the bounds fall back to
    the min/max of the per-sample HCs and ``fallback_used`` is set.
    """
    if ss.n < 2:
        raise InsufficientSamples(f"bounds need at least 2 samples, got {ss.n}")
    union = union_mask(ss.masks)
    inter = intersect_mask(ss.masks)
    union_px = union.count()
    inter_px = inter.count()
    outer = _try_fit_mask(union)
    inner = _try_fit_mask(inter) if inter_px else None
    if outer is not None and inner is not None:
        ub = hc_ramanujan(outer, pixel_size_mm)
        lb = hc_ramanujan(inner, pixel_size_mm)
        if lb > ub:  # fit noise on nearly coincident rings
            lb, ub = ub, lb
        return Bounds(lb, ub, inner, outer, False, union_px, inter_px)
    hcs = [hc_ramanujan(e, pixel_size_mm) for e in ss.surviving_fits()]
    if not hcs:
        raise AllFitsFailed("no per-sample fit available for fallback bounds")
    return Bounds(min(hcs), max(hcs), None, None, True, union_px, inter_px)


def measure_case(ss: SampleSet, pixel_size_mm: float) -> HcMeasurement:
    """Fit all samples, aggregate, and attach bounds.

    Per-sample fit failures are skipped and counted; the case fails with
    AllFitsFailed only when no sample fits. A single-sample set yields a
    point estimate with absent bounds.
    """
    fits = ss.surviving_fits()
    if not fits:
        raise AllFitsFailed(f"none of the {ss.n} samples produced an ellipse fit")
    ellipse_mean = aggregate_ellipses(fits, "mean")
    ellipse_median = aggregate_ellipses(fits, "median")
    bounds = bounds_from_samples(ss, pixel_size_mm) if ss.n >= 2 else None
    return HcMeasurement(
        hc_mean_mm=hc_ramanujan(ellipse_mean, pixel_size_mm),
        hc_median_mm=hc_ramanujan(ellipse_median, pixel_size_mm),
        bounds=bounds,
        ellipse_mean=ellipse_mean,
        ellipse_median=ellipse_median,
        n_samples=len(fits),
        n_failed=ss.n - len(fits),
    )
