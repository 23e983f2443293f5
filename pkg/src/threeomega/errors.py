"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: input/parameter problems exit with 1,
convergence and fit failures with 2.
"""


class ThreeOmegaError(Exception):
    """Base class for all package errors."""


class ParameterError(ThreeOmegaError, ValueError):
    """A physical parameter violates its domain.

    Parameters
    ----------
    field : str
        Name of the offending field.
    message : str
        Human readable description.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigurationError(ThreeOmegaError, ValueError):
    """Required optional data (diameter, emissivity, ...) is missing or a config is malformed."""


class InputError(ThreeOmegaError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class ConvergenceError(ThreeOmegaError):
    """Time integration did not reach a periodic steady state."""

    def __init__(self, message, defect):
        super().__init__(f"{message} (periodicity defect {defect:.3e})")
        self.defect = defect


class FitError(ThreeOmegaError):
    """The least-squares fit failed."""


class FitDegeneracyError(FitError):
    """The data do not constrain all fit parameters."""


class WindowError(ThreeOmegaError, ValueError):
    """A demodulation window does not span an integer number of periods."""


class AliasingError(ThreeOmegaError, ValueError):
    """Sampling too coarse for the requested harmonic."""
