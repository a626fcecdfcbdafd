"""Exception hierarchy.

Every error raised on purpose derives from `UwqkdError` and from the
builtin exception a caller would naturally expect, so both
``except UwqkdError`` and ``except ValueError`` work.
"""


class UwqkdError(Exception):
    """Base class for all errors raised by uwqkd."""


class MieError(UwqkdError, ArithmeticError):
    """A Mie series produced a non-finite intermediate."""

    def __init__(self, x: float, m: complex, detail: str) -> None:
        """Initialize the error.

        Args:
            x: Size parameter of the failing evaluation.
            m: Relative refractive index of the failing evaluation.
            detail: What went wrong.
        """
        super().__init__(f"Mie series failed for x={x!r}, m={m!r}: {detail}")
        self.x = x
        self.m = m


class QuadratureError(UwqkdError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance."""


class CalibrationError(UwqkdError, ValueError):
    """No non-negative particle concentration reaches the target extinction."""


class EmptyEnsembleError(UwqkdError, ValueError):
    """An ensemble statistic was requested for zero photons."""


class UndefinedQBERError(UwqkdError, ZeroDivisionError):
    """QBER requested with neither signal nor errors."""


class UnreachableTargetError(UwqkdError, ValueError):
    """A threshold search cannot meet its target anywhere in range."""


class EnvelopeError(UwqkdError, RuntimeError):
    """The rejection-sampling envelope was exceeded (table bug)."""


class ConfigError(UwqkdError, ValueError):
    """An experiment configuration is invalid."""

    def __init__(self, key: str, message: str) -> None:
        """Initialize the error.

        Args:
            key: Offending configuration key (dotted for nested tables).
            message: Human-readable diagnostic.
        """
        super().__init__(f"{key}: {message}")
        self.key = key
