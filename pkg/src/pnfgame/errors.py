"""Exception hierarchy shared by every module."""


class PNFError(Exception):
    """Base class for all package errors."""


class ConfigError(PNFError, ValueError):
    """A game configuration violates the model's standing assumptions."""


class TopologyError(ConfigError):
    """A requested topology cannot be realized with the given parameters."""


class InvalidProfileError(PNFError, ValueError):
    """A strategy profile is malformed (shape, diagonal, sign)."""


class SolverError(PNFError, ArithmeticError):
    """Base class for numerical failures."""


class NoRootError(SolverError):
    """No sign change could be bracketed."""


class NumericError(SolverError):
    """A function evaluation produced a non-finite value."""


class ConvergenceError(SolverError):
    """An iterative scheme did not reach its tolerance."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual
