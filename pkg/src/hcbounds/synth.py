"""Seeded synthetic cohorts standing in for a probabilistic segmenter.

Every artifact is a pure function of (seed, config, case count, sample
count). Per-case randomness comes from PCG64 generators keyed by
SeedSequence((seed, case_index, stream)), with stream 0 drawing the
ground truth, stream 1 the per-case noise multiplier and stream 2 the
sample perturbations, so ground truths are identical across runs that
differ only in the number of samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .biometry import SampleSet
from .ellipse import Ellipse, quadratic_form
from .errors import EmptyMask
from .masks import BinaryMask, SoftMask, extract_contour, rasterize_ellipse
from .metrics import GroundTruth
from .manifest import write_manifest
from .pgm import write_pgm

_GT_STREAM = 0
_SIGMA_STREAM = 1
_SAMPLE_STREAM = 2

_GRID_MARGIN = 2.0  # px kept between the GT ellipse and the grid border
_MIN_AXIS = 2.0  # px floor on perturbed axes
_MAX_GT_ATTEMPTS = 64


@dataclass(frozen=True)
class SynthConfig:
    """Generator configuration; defaults mirror a 320x384 ultrasound grid."""

    width: int = 320
    height: int = 384
    pixel_size_range: tuple[float, float] = (0.052, 0.326)
    semi_major_range: tuple[float, float] = (60.0, 140.0)
    axis_ratio_range: tuple[float, float] = (1.0, 1.6)
    sigma_center_px: float = 1.5
    sigma_axes_px: float = 1.5
    sigma_theta_rad: float = 0.05
    case_sigma_range: tuple[float, float] = (0.25, 4.0)  # log-uniform multiplier
    sector_dropout_deg: float | None = None
    tau: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"grid must be positive, got {self.width}x{self.height}")
        for name in ("pixel_size_range", "semi_major_range", "axis_ratio_range", "case_sigma_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ValueError(f"{name} must satisfy 0 < lo <= hi, got ({lo}, {hi})")
        if self.axis_ratio_range[0] < 1.0:
            raise ValueError("axis ratio must be >= 1")
        if self.semi_major_range[1] > min(self.width, self.height) / 2.0:
            raise ValueError("semi-major range exceeds half the grid extent")
        for name in ("sigma_center_px", "sigma_axes_px", "sigma_theta_rad"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.sector_dropout_deg is not None and not 0 < self.sector_dropout_deg < 360:
            raise ValueError("sector dropout must lie in (0, 360) degrees")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")


@dataclass(frozen=True)
class CaseRecord:
    """One synthetic case: reproducible from (seed, index, config) alone."""

    case_id: str
    gt: GroundTruth
    samples: SampleSet
    sigma_scale: float


def _stream(seed: int, index: int, stream: int) -> np.random.Generator:
    entropy = (int(seed) & 0xFFFFFFFFFFFFFFFF, int(index), int(stream))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def _extents(a: float, b: float, theta: float) -> tuple[float, float]:
    c = math.cos(theta)
    s = math.sin(theta)
    return math.sqrt((a * c) ** 2 + (b * s) ** 2), math.sqrt((a * s) ** 2 + (b * c) ** 2)


def _fits_grid(e: Ellipse, width: int, height: int) -> bool:
    ex, ey = _extents(e.a, e.b, e.theta)
    return (
        e.cx - ex >= _GRID_MARGIN
        and e.cx + ex <= width - 1 - _GRID_MARGIN
        and e.cy - ey >= _GRID_MARGIN
        and e.cy + ey <= height - 1 - _GRID_MARGIN
    )


def gen_case(seed: int, index: int, cfg: SynthConfig) -> GroundTruth:
    """Draw the ground-truth ellipse and pixel size for one case.

    The parameter ranges can place an ellipse partially off-grid; draws are
    rejected until the ellipse fits with a small margin so that noiseless
    round trips see the full contour. Deterministic per (seed, index, cfg).
    """
    rng = _stream(seed, index, _GT_STREAM)
    w, h = cfg.width, cfg.height
    ellipse = None
    for _ in range(_MAX_GT_ATTEMPTS):
        a = rng.uniform(*cfg.semi_major_range)
        ratio = rng.uniform(*cfg.axis_ratio_range)
        cx = rng.uniform(w / 3.0, 2.0 * w / 3.0)
        cy = rng.uniform(h / 3.0, 2.0 * h / 3.0)
        theta = rng.uniform(0.0, math.pi)
        candidate = Ellipse.canonical(cx, cy, a, a / ratio, theta)
        if _fits_grid(candidate, w, h):
            ellipse = candidate
            break
    if ellipse is None:
        # deterministic last resort: shrink the axes until the ellipse fits
        ex, ey = _extents(candidate.a, candidate.b, candidate.theta)
        room = min(
            candidate.cx - _GRID_MARGIN,
            w - 1 - _GRID_MARGIN - candidate.cx,
            candidate.cy - _GRID_MARGIN,
            h - 1 - _GRID_MARGIN - candidate.cy,
        )
        shrink = 0.95 * room / max(ex, ey)
        ellipse = Ellipse.canonical(
            candidate.cx, candidate.cy, candidate.a * shrink, candidate.b * shrink, candidate.theta
        )
    pixel_size = rng.uniform(*cfg.pixel_size_range)
    return GroundTruth(ellipse=ellipse, pixel_size_mm=float(pixel_size))


def case_sigma(seed: int, index: int, cfg: SynthConfig) -> float:
    """Per-case noise multiplier, log-uniform over the configured range."""
    lo, hi = cfg.case_sigma_range
    if hi == lo:
        return float(lo)
    rng = _stream(seed, index, _SIGMA_STREAM)
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def _drop_sector(mask: BinaryMask, e: Ellipse, rng: np.random.Generator, gap_deg: float) -> np.ndarray:
    start = rng.uniform(0.0, 2.0 * math.pi)
    try:
        points = extract_contour(mask)
    except EmptyMask:
        return np.empty((0, 2))
    angles = np.arctan2(points[:, 1] - e.cy, points[:, 0] - e.cx)
    relative = np.mod(angles - start, 2.0 * math.pi)
    return points[relative >= math.radians(gap_deg)]


def sample_predictions(
    gt: GroundTruth,
    cfg: SynthConfig,
    n: int,
    rng: np.random.Generator,
    sigma_scale: float = 1.0,
) -> SampleSet:
    """Draw n plausible segmentations around the ground-truth ellipse.

    Each sample perturbs (cx, cy, a, b, theta) with independent zero-mean
    Gaussian noise scaled by ``sigma_scale``, re-canonicalizes and
    rasterizes. With sector dropout configured, a random angular arc is
    removed from the fit-time contour of each sample while the stored mask
    stays filled, mimicking a fit made ambiguous by missing boundary signal.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    sc = cfg.sigma_center_px * sigma_scale
    sa = cfg.sigma_axes_px * sigma_scale
    st = cfg.sigma_theta_rad * sigma_scale
    masks: list[BinaryMask] = []
    softs: list[SoftMask] | None = [] if cfg.tau is not None else None
    contours: list[np.ndarray] | None = [] if cfg.sector_dropout_deg is not None else None
    for _ in range(n):
        dcx = rng.normal(0.0, sc)
        dcy = rng.normal(0.0, sc)
        da = rng.normal(0.0, sa)
        db = rng.normal(0.0, sa)
        dth = rng.normal(0.0, st)
        e = Ellipse.canonical(
            gt.cx + dcx,
            gt.cy + dcy,
            max(gt.a + da, _MIN_AXIS),
            max(gt.b + db, _MIN_AXIS),
            gt.theta + dth,
        )
        mask = rasterize_ellipse(e, cfg.width, cfg.height)
        masks.append(mask)
        if softs is not None:
            softs.append(soft_map(e, cfg.tau, cfg.width, cfg.height))
        if contours is not None:
            contours.append(_drop_sector(mask, e, rng, cfg.sector_dropout_deg))
    return SampleSet(masks, soft=softs, contours=contours)


def soft_map(e: Ellipse, tau: float, width: int, height: int) -> SoftMask:
    """Foreground probability logistic((1 - Q)/tau); exactly 0.5 on the boundary.

    Thresholding at 0.5 (foreground where p >= 0.5) reproduces the binary
    rasterization exactly, since both use the same quadratic form.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    xs = np.arange(width, dtype=float)
    ys = np.arange(height, dtype=float)
    z = (1.0 - quadratic_form(e, xs[None, :], ys[:, None])) / tau
    p = np.empty_like(z)
    pos = z >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    p[~pos] = ez / (1.0 + ez)
    return SoftMask(p)


def make_case(cfg: SynthConfig, index: int, n: int) -> CaseRecord:
    """Generate one complete case (ground truth plus sample set)."""
    gt = gen_case(cfg.seed, index, cfg)
    sigma_scale = case_sigma(cfg.seed, index, cfg)
    rng = _stream(cfg.seed, index, _SAMPLE_STREAM)
    samples = sample_predictions(gt, cfg, n, rng, sigma_scale=sigma_scale)
    return CaseRecord(f"case_{index:04d}", gt, samples, sigma_scale)


def generate_records(cfg: SynthConfig, m: int, n: int):
    """Yield m cases of n samples each."""
    if m < 1:
        raise ValueError(f"need at least one case, got m={m}")
    for index in range(m):
        yield make_case(cfg, index, n)


def gen_dataset(cfg: SynthConfig, m: int, n: int, out_dir) -> Path:
    """Write a cohort to disk: per-case mask PGMs, optional soft-map PGMs,
    and a manifest CSV. Returns the manifest path. Output bytes are
    identical across runs with the same inputs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pad = max(3, len(str(n - 1)))
    rows = []
    for record in generate_records(cfg, m, n):
        case_dir = out / "cases" / record.case_id
        masks_dir = case_dir / "masks"
        masks_dir.mkdir(parents=True, exist_ok=True)
        for i, mask in enumerate(record.samples.masks):
            write_pgm(mask, masks_dir / f"{i:0{pad}d}.pgm")
        soft_rel = ""
        if record.samples.soft is not None:
            soft_dir = case_dir / "soft"
            soft_dir.mkdir(parents=True, exist_ok=True)
            for i, sm in enumerate(record.samples.soft):
                write_pgm(sm, soft_dir / f"{i:0{pad}d}.pgm")
            soft_rel = f"cases/{record.case_id}/soft"
        gt = record.gt
        rows.append(
            {
                "case_id": record.case_id,
                "pixel_size_mm": repr(gt.pixel_size_mm),
                "gt_cx": repr(gt.cx),
                "gt_cy": repr(gt.cy),
                "gt_a": repr(gt.a),
                "gt_b": repr(gt.b),
                "gt_theta": repr(gt.theta),
                "masks_dir": f"cases/{record.case_id}/masks",
                "soft_dir": soft_rel,
            }
        )
    manifest_path = out / "manifest.csv"
    write_manifest(rows, manifest_path)
    return manifest_path
