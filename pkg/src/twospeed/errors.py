"""Exception hierarchy for the two-speed transport laboratory."""


class TwoSpeedError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TwoSpeedError, ValueError):
    """A coordinate lies outside the unit interval."""


class ShapeError(TwoSpeedError, ValueError):
    """Arrays or grids do not line up."""


class DegenerateFieldError(TwoSpeedError):
    """A velocity field drops below the non-degeneracy floor."""


class InvalidCrossSectionError(TwoSpeedError):
    """The reaction cross-section is negative beyond tolerance."""


class NonUniqueSteadyStateError(TwoSpeedError):
    """The periodic flux map does not have a one-dimensional fixed space."""


class PositivityError(TwoSpeedError):
    """A steady profile changed sign where positivity was required."""


class DefectiveGeneratorError(TwoSpeedError):
    """The assembled generator does not have a simple zero mode."""


class ConfigurationError(TwoSpeedError):
    """A run configuration is malformed or inconsistent."""


class DivergenceError(TwoSpeedError):
    """Time integration produced non-finite values."""


class NonuniformSamplingError(TwoSpeedError):
    """An operation requires uniformly spaced observation times."""


class InsufficientDataError(TwoSpeedError):
    """Not enough usable samples for a fit."""


class NumericalError(TwoSpeedError):
    """A dense linear-algebra kernel failed or exceeded its configured cap."""
