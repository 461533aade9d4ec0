"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 3,
accuracy problems with 4. Domain errors are configuration errors raised
for arguments outside the mathematical domain of an operation.
"""


class CthtError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(CthtError, ValueError):
    """Invalid grids, quadrature layouts or scenario settings."""


class DomainError(ConfigurationError):
    """Argument outside the domain where an operation is defined."""


class AccuracyError(CthtError, ArithmeticError):
    """A numerical procedure could not reach its accuracy target.

    ``partial`` carries the best available value (or ``None``) and
    ``estimate`` an error or tail estimate when one is known.
    """

    def __init__(self, message, partial=None, estimate=None):
        super().__init__(message)
        self.partial = partial
        self.estimate = estimate
