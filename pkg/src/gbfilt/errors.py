"""Exception hierarchy for gbfilt.

All library errors derive from :class:`GbfiltError` so callers can catch one
base class. The CLI maps subclasses onto its documented exit codes.
"""


class GbfiltError(Exception):
    """Base class for all gbfilt errors."""


class ConfigError(GbfiltError):
    """Invalid configuration: bad hyperparameters, unknown mode names."""


class DataError(GbfiltError):
    """Invalid input data: empty signals, length mismatches, bad files."""


class NumericOverflowError(GbfiltError):
    """A computation produced a non-finite value (NaN or infinity)."""


class SingularSystemError(GbfiltError):
    """The normal equations are singular or numerically unsolvable."""


class DivergenceError(GbfiltError):
    """Training loss exploded beyond the divergence threshold."""


class ModelFormatError(GbfiltError):
    """A model file failed to parse or validate.

    The ``path`` attribute points at the offending field, e.g.
    ``"stages[1].poly[2]"``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
