"""Exception types shared across the package."""


class CytorusError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CytorusError):
    """Experiment configuration failed validation or parsing."""


class SmoothnessError(CytorusError):
    """A constructed field carries too much energy in its top spectral band."""


class TamingError(CytorusError):
    """A 2-form fails to tame the given almost complex structure."""


class PositivityError(CytorusError):
    """A metric or corrected form lost positive definiteness."""


class GaugeError(CytorusError):
    """A field violates the normalization (gauge) required by an operation."""


class DegreeError(CytorusError):
    """Differential-form degrees are incompatible or exceed the dimension."""


class LinearSolveError(CytorusError):
    """An inner linear solve failed to reach its tolerance."""


class ScheduleError(CytorusError):
    """The continuity schedule was exhausted without convergence."""
