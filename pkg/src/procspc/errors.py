"""Exception hierarchy.

``DataError`` subclasses describe problems with the input data (bad header,
too few points, impossible limits).  The CLI maps them to exit code 65.
"""


class ProcSpcError(Exception):
    """Base class for every error raised by procspc."""


class DataError(ProcSpcError, ValueError):
    """Input data cannot be used as given."""


class LimitOrderError(DataError):
    def __init__(self, lower_name, upper_name, lower, upper):
        self.pair = (lower_name, upper_name)
        super().__init__(
            f"{lower_name}>{upper_name}: {lower_name}={lower!r} exceeds {upper_name}={upper!r}"
        )


class TimestampParseError(DataError):
    def __init__(self, text):
        self.text = text
        super().__init__(f"cannot parse timestamp {text!r}")


class HeaderError(DataError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing columns: " + ", ".join(self.missing))


class EmptyChartError(DataError):
    pass


class EmptySeries(DataError):
    pass


class TooFewPoints(DataError):
    pass


class SingularFit(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class LengthMismatch(ProcSpcError, ValueError):
    pass


class EmptyInput(ProcSpcError, ValueError):
    pass


class UnfittedModel(ProcSpcError):
    pass


class MalformedModelError(ProcSpcError, ValueError):
    pass


class SchemaVersionError(MalformedModelError):
    pass


class IoError(ProcSpcError, OSError):
    pass
