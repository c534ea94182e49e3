"""Exception taxonomy shared across the library.

Every library error derives from :class:`CepclustError`.  The ``exit_code``
attribute drives the process exit status of the command-line interface:
1 for usage errors, 2 for data/config errors, 3 for benchmark bound
violations.
"""


class CepclustError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2


class UsageError(CepclustError):
    """Bad parameter values supplied by the caller (CLI exit code 1)."""

    exit_code = 1


class ValidationError(CepclustError):
    """A value violates a documented precondition or invariant."""


class ConfigError(CepclustError):
    """A configuration object is inconsistent with the data it is applied to."""


class LengthError(ValidationError):
    """A series or transform length is invalid (too short, not a power of two)."""


class IncompatibleLengthError(ValidationError):
    """Two series have different lengths where equal lengths are required."""


class InfeasibleBandError(ValidationError):
    """The warping band is too narrow to admit any alignment path."""


class DivergenceError(CepclustError):
    """A simulated output exceeded the divergence guard threshold."""


class UnboundedNormError(CepclustError):
    """A system norm does not exist (unstable system or pole on the unit circle)."""


class DiscretizationSingularityError(CepclustError):
    """The bilinear transform is singular for the given system and step."""


class IncompatibleModelError(ValidationError):
    """Two models cannot be combined (for example, different sample periods)."""


class DataFormatError(CepclustError):
    """A file could not be parsed in the expected format."""


class AcceptanceFailure(CepclustError):
    """A benchmark cell violated its configured bound (CLI exit code 3)."""

    exit_code = 3
