"""Exception hierarchy shared by the ndsan modules."""


class NdsanError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(NdsanError, ValueError):
    """A network failed structural validation.

    The full :class:`~ndsan.model.ValidationReport` is kept on ``report``.
    """

    def __init__(self, report):
        self.report = report
        lines = [f"{v.path}: {v.message}" for v in report.violations]
        super().__init__("; ".join(lines) or "invalid network")


class CyclicGraphError(NdsanError, ValueError):
    pass


class MultipleSourcesOrSinksError(NdsanError, ValueError):
    pass


class SupportExceedsGridError(NdsanError, ValueError):
    pass


class GridMismatchError(NdsanError, ValueError):
    pass


class WeightSumError(NdsanError, ValueError):
    pass


class InvalidLoopProbsError(NdsanError, ValueError):
    pass


class NotReducibleError(NdsanError, ValueError):
    """The network has an acyclic block whose parallel branches share vertices.

    Exact analysis is refused for such networks; simulate them instead.
    """


class EmptySampleError(NdsanError, ValueError):
    pass


class UnsupportedEpsilonError(NdsanError, ValueError):
    pass


class UnsupportedConfidenceError(NdsanError, ValueError):
    pass


class NetworkSyntaxError(NdsanError, ValueError):
    """Malformed network document text."""

    def __init__(self, message, line=None, column=None, position=None):
        self.line = line
        self.column = column
        self.position = position
        where = f" at line {line} column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(NdsanError, ValueError):
    """Well-formed text that does not describe a network."""
