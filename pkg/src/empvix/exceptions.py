"""Exception types raised across the package."""


class EmpVixError(Exception):
    """Base class for all package errors."""


class DataError(EmpVixError, ValueError):
    """Input data could not be parsed or failed validation."""


class DomainError(EmpVixError, ValueError):
    """An argument lies outside the domain of the operation."""


class FitError(EmpVixError):
    """A quantile polynomial fit was rejected."""


class NumericalError(EmpVixError, ArithmeticError):
    """A computation produced non-finite or inaccurate values."""


class CalibrationError(EmpVixError):
    """A calibration could not produce a usable estimate."""
