"""Exception hierarchy shared by every module of the package."""


class CoreEPError(Exception):
    """Base class for all errors raised by coreep."""


class DimensionError(CoreEPError, ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NumericBreakdownError(CoreEPError, ArithmeticError):
    """A dense factorization (SVD, Schur, solve) failed or returned garbage."""


class IllConditionedSplitError(NumericBreakdownError):
    """The nonzero and zero eigenvalue clusters are not separated enough."""


class PreconditionError(CoreEPError, ValueError):
    """An operation was called outside the hypotheses it is defined under."""


class NotCoreInvertibleError(PreconditionError):
    """The structured block matrix has a singular ``I + PQ``."""


class ExtractionError(CoreEPError):
    """``L`` cannot be written in the structured block form relative to ``A``."""


class GuardError(PreconditionError):
    """A norm or range guard required by a closed-form formula failed."""


class InconsistencyError(CoreEPError):
    """Conditions that are mathematically equivalent disagreed numerically."""


class ParseError(CoreEPError, ValueError):
    """A matrix file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
