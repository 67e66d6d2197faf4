"""Ellipse representation, conic conversions and direct least-squares fitting.

The fitter is the ellipse-specific constrained least-squares method
(4AC - B^2 = 1 side condition) solved through the numerically stable
partitioned form: the 6x6 generalized eigenproblem is reduced to a 3x3
eigenproblem on the quadratic block. Input points are centered on their
centroid and scaled to RMS radius sqrt(2) before fitting, and the conic is
de-normalized afterwards, so the fit is well conditioned for screen-scale
pixel coordinates and is guaranteed to return an ellipse when one exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateConfiguration,
    NotAnEllipse,
    SingularConic,
    TooFewPoints,
)

# relative tolerance for discriminant / singularity checks
_RTOL = 1e-12


def canonical_angle(theta: float) -> float:
    """Wrap an orientation angle into [0, pi); orientation is pi-periodic."""
    wrapped = math.fmod(float(theta), math.pi)
    if wrapped < 0.0:
        wrapped += math.pi
    if wrapped >= math.pi:  # fmod(-eps, pi) + pi can round up to pi
        wrapped = 0.0
    return wrapped


def wrap_orientation_difference(delta):
    """Wrap orientation differences into (-pi/2, pi/2] (mod-pi arithmetic)."""
    half = math.pi / 2.0
    return half - np.mod(half - np.asarray(delta, dtype=float), math.pi)


def circular_orientation_mean(thetas) -> float:
    """Mean orientation of pi-periodic angles via the doubled-angle circle."""
    t = np.asarray(thetas, dtype=float)
    return 0.5 * math.atan2(np.sin(2.0 * t).sum(), np.cos(2.0 * t).sum())


@dataclass(frozen=True)
class Ellipse:
    """Geometric ellipse parameters in pixel coordinates.

    ``cx, cy`` center, ``a`` semi-major and ``b`` semi-minor axis lengths,
    ``theta`` orientation of the major axis in radians. Canonical form
    requires ``a >= b > 0`` and ``theta`` in ``[0, pi)``; circles carry
    ``theta == 0``. Use :meth:`canonical` to build from raw parameters.
    """

    cx: float
    cy: float
    a: float
    b: float
    theta: float

    def __post_init__(self) -> None:
        values = (self.cx, self.cy, self.a, self.b, self.theta)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite ellipse parameters: {values}")
        if not self.a >= self.b > 0:
            raise ValueError(f"axes must satisfy a >= b > 0, got a={self.a} b={self.b}")
        if not 0.0 <= self.theta < math.pi:
            raise ValueError(f"theta must lie in [0, pi), got {self.theta}")
        if self.a == self.b and self.theta != 0.0:
            raise ValueError("circles are canonical with theta == 0")

    @classmethod
    def canonical(cls, cx: float, cy: float, a: float, b: float, theta: float) -> "Ellipse":
        """Build an ellipse, swapping axes and wrapping theta as needed."""
        a = float(a)
        b = float(b)
        theta = float(theta)
        if b > a:
            a, b = b, a
            theta += math.pi / 2.0
        theta = 0.0 if a == b else canonical_angle(theta)
        return cls(float(cx), float(cy), a, b, theta)


def quadratic_form(e: Ellipse, x, y):
    """Evaluate ((x'/a)^2 + (y'/b)^2) in the ellipse frame; 1 on the boundary.

    ``x`` and ``y`` may be scalars or broadcastable arrays.
    """
    dx = np.asarray(x, dtype=float) - e.cx
    dy = np.asarray(y, dtype=float) - e.cy
    c = math.cos(e.theta)
    s = math.sin(e.theta)
    xr = (dx * c + dy * s) / e.a
    yr = (dy * c - dx * s) / e.b
    return xr * xr + yr * yr


def ellipse_boundary_points(e: Ellipse, k: int) -> np.ndarray:
    """K boundary points at parameter angles 2*pi*j/K, as an (K, 2) array."""
    if k < 1:
        raise ValueError(f"need at least one boundary point, got k={k}")
    t = 2.0 * math.pi * np.arange(k, dtype=float) / k
    ct = np.cos(t)
    st = np.sin(t)
    c = math.cos(e.theta)
    s = math.sin(e.theta)
    x = e.cx + e.a * ct * c - e.b * st * s
    y = e.cy + e.a * ct * s + e.b * st * c
    return np.column_stack([x, y])


def ellipse_area(e: Ellipse, pixel_size_mm: float) -> float:
    """Ellipse area in mm^2 for an isotropic pixel size in mm/pixel."""
    if pixel_size_mm <= 0:
        raise ValueError(f"pixel size must be positive, got {pixel_size_mm}")
    return math.pi * e.a * e.b * pixel_size_mm * pixel_size_mm


@dataclass(frozen=True)
class Conic:
    """Implicit conic A x^2 + B xy + C y^2 + D x + E y + F = 0.

    Coefficients are stored normalized to unit Euclidean length with A >= 0,
    so algebraically identical conics compare equal.
    """

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def __post_init__(self) -> None:
        vec = np.array([self.A, self.B, self.C, self.D, self.E, self.F], dtype=float)
        if not np.isfinite(vec).all():
            raise ValueError(f"non-finite conic coefficients: {vec}")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("zero conic")
        vec /= norm
        if vec[0] < 0.0 or (vec[0] == 0.0 and vec[2] < 0.0):
            vec = -vec
        for name, value in zip("ABCDEF", vec):
            object.__setattr__(self, name, float(value))

    def coefficients(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D, self.E, self.F])

    def discriminant(self) -> float:
        """4AC - B^2; positive exactly for (possibly imaginary) ellipses."""
        return 4.0 * self.A * self.C - self.B * self.B


def conic_from_ellipse(e: Ellipse) -> Conic:
    """Expand an ellipse's quadratic form into implicit conic coefficients."""
    c = math.cos(e.theta)
    s = math.sin(e.theta)
    ia = 1.0 / (e.a * e.a)
    ib = 1.0 / (e.b * e.b)
    A = c * c * ia + s * s * ib
    B = 2.0 * c * s * (ia - ib)
    C = s * s * ia + c * c * ib
    D = -2.0 * A * e.cx - B * e.cy
    E = -B * e.cx - 2.0 * C * e.cy
    F = A * e.cx * e.cx + B * e.cx * e.cy + C * e.cy * e.cy - 1.0
    return Conic(A, B, C, D, E, F)


def conic_to_geometric(conic: Conic) -> Ellipse:
    """Convert implicit conic coefficients to geometric ellipse parameters.

    The center solves the linear system [2A B; B 2C] c = [-D, -E]; axis
    lengths and orientation come from the eigen-decomposition of the
    quadratic part.

    Raises
    ------
    NotAnEllipse
        if the discriminant 4AC - B^2 is not positive within tolerance or
        the conic has no real solution set.
    SingularConic
        if the center system cannot be solved.
    """
    A, B, C, D, E, F = conic.coefficients()
    scale = float(np.abs(conic.coefficients()).max())
    tol = _RTOL * scale * scale
    disc = 4.0 * A * C - B * B
    if disc <= tol:
        raise NotAnEllipse(f"discriminant 4AC - B^2 = {disc:.3e} is not positive")
    try:
        cx, cy = np.linalg.solve(
            np.array([[2.0 * A, B], [B, 2.0 * C]]), np.array([-D, -E])
        )
    except np.linalg.LinAlgError as exc:
        raise SingularConic("quadratic part is not invertible") from exc
    # constant term after translating the center to the origin
    f0 = A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F
    rhs = -f0
    if rhs <= tol:
        raise NotAnEllipse("conic has empty or degenerate real solution set")
    evals, evecs = np.linalg.eigh(np.array([[A, B / 2.0], [B / 2.0, C]]))
    if evals[0] <= 0.0:
        raise NotAnEllipse("quadratic part is not positive definite")
    a = math.sqrt(rhs / evals[0])  # smaller eigenvalue -> major axis
    b = math.sqrt(rhs / evals[1])
    theta = math.atan2(evecs[1, 0], evecs[0, 0])
    return Ellipse.canonical(float(cx), float(cy), a, b, theta)


def fit_ellipse(points) -> Ellipse:
    """Direct least-squares ellipse fit to 2-D points.

    Parameters
    ----------
    points : array_like, shape (n, 2)
        Point coordinates; at least 5 points, not all collinear.

    Returns
    -------
    Ellipse
        The constrained least-squares ellipse in canonical geometric form.

    Raises
    ------
    TooFewPoints
        for fewer than 5 points.
    DegenerateConfiguration
        if the reduced eigenproblem yields no ellipse solution
        (collinear or coincident points, degenerate scatter).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must be (n, 2) array-like, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")
    n = pts.shape[0]
    if n < 5:
        raise TooFewPoints(f"ellipse fit needs at least 5 points, got {n}")

    centroid = pts.mean(axis=0)
    centered = pts - centroid
    rms = math.sqrt(float((centered * centered).sum(axis=1).mean()))
    if rms <= 0.0:
        raise DegenerateConfiguration("points are coincident")
    scale = rms / math.sqrt(2.0)
    x = centered[:, 0] / scale
    y = centered[:, 1] / scale

    d1 = np.column_stack([x * x, x * y, y * y])
    d2 = np.column_stack([x, y, np.ones(n)])
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError as exc:
        raise DegenerateConfiguration("points are collinear") from exc
    m = s1 + s2 @ t
    m = np.vstack([m[2] / 2.0, -m[1], m[0] / 2.0])  # premultiplied constraint inverse

    evals, evecs = np.linalg.eig(m)
    best = None
    best_cond = 0.0
    for i in range(3):
        v = evecs[:, i]
        if np.iscomplexobj(v):
            if float(np.abs(v.imag).max()) > 1e-8:
                continue
            v = v.real
        v = v / np.linalg.norm(v)
        cond = 4.0 * v[0] * v[2] - v[1] * v[1]
        if cond > best_cond:
            best, best_cond = v, float(cond)
    if best is None:
        raise DegenerateConfiguration("fit eigenproblem has no ellipse solution")

    coef = np.concatenate([best, t @ best])
    # de-normalize: fitting ran on x_n = (x - centroid) / scale
    h = np.array(
        [
            [1.0 / scale, 0.0, -centroid[0] / scale],
            [0.0, 1.0 / scale, -centroid[1] / scale],
            [0.0, 0.0, 1.0],
        ]
    )
    cmat = np.array(
        [
            [coef[0], coef[1] / 2.0, coef[3] / 2.0],
            [coef[1] / 2.0, coef[2], coef[4] / 2.0],
            [coef[3] / 2.0, coef[4] / 2.0, coef[5]],
        ]
    )
    w = h.T @ cmat @ h
    conic = Conic(w[0, 0], 2.0 * w[0, 1], w[1, 1], 2.0 * w[0, 2], 2.0 * w[1, 2], w[2, 2])
    try:
        return conic_to_geometric(conic)
    except (NotAnEllipse, SingularConic) as exc:
        raise DegenerateConfiguration(str(exc)) from exc
