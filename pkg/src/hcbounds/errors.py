"""Exception types shared across the package."""


class HcBoundsError(Exception):
    """Base class for all hcbounds errors."""


# -- geometry / fitting ------------------------------------------------------

class TooFewPoints(HcBoundsError):
    """Fewer points than the five needed to determine a conic."""


class DegenerateConfiguration(HcBoundsError):
    """Point set admits no ellipse solution (collinear, coincident, ...)."""


class NotAnEllipse(HcBoundsError):
    """Conic coefficients do not describe a real ellipse."""


class SingularConic(HcBoundsError):
    """Quadratic part of the conic is not invertible within tolerance."""


class EmptyMask(HcBoundsError):
    """Mask contains no foreground pixels."""


class NoConvergence(HcBoundsError):
    """Adaptive quadrature hit its refinement cap."""


# -- sampling / scoring ------------------------------------------------------

class EmptyList(HcBoundsError):
    """An aggregation was asked for on an empty collection."""


class InsufficientSamples(HcBoundsError):
    """Operation needs more samples than the set provides."""


class AllFitsFailed(HcBoundsError):
    """No sample in the set produced a usable ellipse fit."""


class DimensionMismatch(HcBoundsError):
    """Grids in one operation do not share dimensions."""


class UnknownScore(HcBoundsError):
    """Requested variance score is not defined or not present."""


class EmptyCohort(HcBoundsError):
    """Sweep requested over zero evaluation rows."""


# -- file formats ------------------------------------------------------------

class MalformedHeader(HcBoundsError):
    """PGM header cannot be parsed."""


class InvalidMaskValue(HcBoundsError):
    """Mask PGM contains sample values other than 0 and 255."""


class UnsupportedMaxval(HcBoundsError):
    """PGM maxval is neither 255 (mask) nor 65535 (soft map)."""


class MissingColumn(HcBoundsError):
    """Manifest lacks a required column."""


class BadNumber(HcBoundsError):
    """Manifest field failed numeric validation."""


class EmptyManifest(HcBoundsError):
    """Manifest contains no data rows."""
