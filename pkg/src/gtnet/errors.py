"""Exception hierarchy. CLI exit codes key off these."""


class GTNetError(Exception):
    pass


class ValidationError(GTNetError, ValueError):
    """Bad input: shapes, ranges, flags."""


class ParseError(ValidationError):
    pass


class FormatError(ValidationError):
    """Corrupt or truncated binary file."""


class NumericalError(GTNetError, ArithmeticError):
    pass


class TrainingError(NumericalError):
    pass


class DataError(ValidationError):
    """Corpus cannot satisfy the requested construction."""
