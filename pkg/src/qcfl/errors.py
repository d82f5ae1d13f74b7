"""Exception hierarchy shared by every module.

The CLI maps these onto exit statuses: validation problems exit 1,
divergence or exhausted budgets exit 2 and precondition violations exit 3.
"""


class QcflError(Exception):
    """Base class for all library errors."""


class ValidationError(QcflError, ValueError):
    """A structure is malformed or violates a law it must satisfy."""


class DomainMismatchError(ValidationError):
    """A value does not belong to the carrier of the domain it is used with."""


class ParseError(ValidationError):
    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class DivergenceError(QcflError):
    """The set of derivations (or computations) for a word is infinite."""

    def __init__(self, message, cycle=None):
        self.cycle = cycle
        super().__init__(message)


class BudgetError(DivergenceError):
    """An enumeration exceeded its configured cap."""


class PreconditionError(QcflError):
    """An operation was called on an input outside its contract."""
