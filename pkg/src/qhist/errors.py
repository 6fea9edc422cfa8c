"""Exception hierarchy.

Every error exposes ``kind`` (the class name by default) so reports and the
CLI can surface a stable identifier.
"""

from __future__ import annotations


class QHistError(Exception):
    """Base class for all library errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class DimensionMismatch(QHistError, ValueError):
    pass


class ZeroSpan(QHistError, ValueError):
    pass


class NotAProjector(QHistError, ValueError):
    pass


class NotUnitary(QHistError, ValueError):
    pass


class InvalidDirection(QHistError, ValueError):
    pass


class NotADecomposition(QHistError, ValueError):
    pass


class NotOrthogonal(QHistError, ValueError):
    pass


class ZeroElement(QHistError, ValueError):
    pass


class DegenerateProjector(QHistError, ValueError):
    pass


class IncompatibleFrameworks(QHistError):
    """Two or more frameworks contain noncommuting projectors."""


class MeaninglessCombination(QHistError):
    """A combination of propositions that is undefined, as opposed to false."""


class IncompatibleProjectors(QHistError):
    pass


class UnnormalizedState(QHistError, ValueError):
    pass


class ZeroCondition(QHistError, ValueError):
    pass


class NumericalInstability(QHistError, ArithmeticError):
    pass


class BadFactorization(QHistError, ValueError):
    pass


class InvalidDensityMatrix(QHistError, ValueError):
    pass


class InvalidEnsemble(QHistError, ValueError):
    pass


class TimeMismatch(QHistError, ValueError):
    pass


class NotInFamily(QHistError, ValueError):
    pass


class FamilyTooLarge(QHistError):
    pass


class InconsistentFamily(QHistError):
    pass


class ConstructionFailed(QHistError):
    pass


class NonpositiveTime(QHistError, ValueError):
    pass


class NonpositiveDiffusion(QHistError, ValueError):
    pass


class ParseError(QHistError, ValueError):
    """Scenario-file error annotated with a line/column position.

    ``kind`` defaults to ``"ParseError"`` but may carry the kind of an
    underlying library error (e.g. ``"DimensionMismatch"``) raised while the
    file was being validated.
    """

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None, kind: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self._kind = kind
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)

    @property
    def kind(self) -> str:
        return self._kind or type(self).__name__


class UnknownName(ParseError):
    pass
