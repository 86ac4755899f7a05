"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto
distinct process exit statuses without a lookup table of its own.
"""


class KernelJLError(Exception):
    exit_code = 1


class ConfigError(KernelJLError):
    exit_code = 2


class IoError(KernelJLError):
    exit_code = 3


class ParseError(KernelJLError):
    exit_code = 4

    def __init__(self, message, line=None, col=None):
        super().__init__(message)
        self.line = line
        self.col = col


class NumericError(KernelJLError):
    """Base for numerical degeneracy and convergence problems."""

    exit_code = 5


# shape / argument validation -> config-class exit code
class ShapeError(ConfigError, ValueError):
    pass


class InvalidRank(ConfigError, ValueError):
    pass


class InvalidK(ConfigError, ValueError):
    pass


class InvalidSize(ConfigError, ValueError):
    pass


class InvalidSpec(ConfigError, ValueError):
    pass


class InsufficientDraws(ConfigError, ValueError):
    pass


class OracleTooSmall(ConfigError, ValueError):
    pass


class StateError(ConfigError, RuntimeError):
    pass


class EmptyData(NumericError, ValueError):
    pass


class DegenerateData(NumericError, ValueError):
    pass


class InvalidMatrix(NumericError, ValueError):
    pass


class ConvergenceFailure(NumericError, RuntimeError):
    pass


class RankDeficient(NumericError, ValueError):
    """Requested rank exceeds what survives the eigenvalue floor."""

    def __init__(self, message, achievable_rank):
        super().__init__(message)
        self.achievable_rank = achievable_rank
