"""Exception hierarchy."""


class RecoilFringeError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RecoilFringeError, ValueError):
    """Invalid physical configuration, grid, or config-file entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ContractViolation(RecoilFringeError, ValueError):
    """An operation was called outside its precondition."""


class DomainError(RecoilFringeError, ValueError):
    """Argument outside the mathematical domain of a function."""


class DegenerateScanError(RecoilFringeError, ValueError):
    """A flux scan carries no usable signal (e.g. zero mean flux)."""


class NumericError(RecoilFringeError, ArithmeticError):
    """A numerical procedure failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnsupportedVariantError(RecoilFringeError, NotImplementedError):
    """No closed form exists for the requested distribution variant."""


class CSVParseError(RecoilFringeError, ValueError):
    """Malformed CSV input; carries the 1-based line number."""

    def __init__(self, message, line):
        super().__init__("line %d: %s" % (line, message))
        self.line = line
