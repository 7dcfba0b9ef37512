"""Exception hierarchy shared by the library and the command line."""


class SpanLedgerError(Exception):
    """Base class for all errors raised by spanledger."""


class InvalidParameterError(SpanLedgerError, ValueError):
    """A physical parameter is non-finite or outside its allowed range."""


class DomainError(SpanLedgerError, ValueError):
    """A mathematical function was evaluated outside its domain."""


class ConvergenceBudgetError(SpanLedgerError, RuntimeError):
    """Requested accuracy needs more series terms than the configured cap."""


class ModeUnsupportedError(SpanLedgerError, ValueError):
    """The accumulation mode cannot be applied to the given route."""


class NonPerturbativeError(SpanLedgerError, RuntimeError):
    """A simulation left the first-order perturbative regime."""


class ConfigError(SpanLedgerError):
    """Scenario file could not be parsed or validated.

    ``line`` and ``column`` are 1-based and point at the offending key when
    it can be located in the source text.
    """

    def __init__(self, message, line=None, column=None, path=None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(str(self))

    def __str__(self):
        where = []
        if self.path:
            where.append(str(self.path))
        if self.line is not None:
            where.append(f"line {self.line}")
            if self.column is not None:
                where.append(f"column {self.column}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message
