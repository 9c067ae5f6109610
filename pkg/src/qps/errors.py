"""Exception types raised by the qps package."""


class QPSError(Exception):
    """Base class for all package errors."""


class DegenerateLevel(QPSError, ArithmeticError):
    """A Fock level has chi_n == 0, so the adiabatic coefficients are undefined."""

    def __init__(self, n):
        super().__init__(f"chi_n vanishes at level n={n} (epsilon = 0 and L_n(x) = 0)")
        self.n = n


class IndexOutOfRange(QPSError, IndexError):
    pass


class TruncationSpill(QPSError, RuntimeError):
    """Basis change to the Fock basis lost more weight than allowed."""


class DimensionMismatch(QPSError, ValueError):
    pass


class KindMismatch(QPSError, ValueError):
    pass


class ConfigError(QPSError, ValueError):
    """Base for configuration problems; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class RangeError(ConfigError):
    pass
