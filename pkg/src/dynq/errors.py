"""Exception hierarchy shared by all maintainers."""


class DynqError(Exception):
    """Base class for all package errors."""


class UnknownRelation(DynqError):
    pass


class ArityMismatch(DynqError):
    pass


class OutOfDomain(DynqError):
    pass


class AlreadyPresentOnInsert(DynqError):
    pass


class NotPresentOnDelete(DynqError):
    pass


class BoundExceededWithoutFixpoint(DynqError):
    pass


class ScriptSyntaxError(DynqError):
    """Parse failure carrying a 1-based line and column."""

    def __init__(self, msg, line=0, col=0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {msg}")


class MissingHeader(ScriptSyntaxError):
    pass


class VerificationError(DynqError):
    """A maintainer diverged from its oracle."""


class TooFewActivePrimes(DynqError):
    pass


class EmptyWord(DynqError):
    pass


class InvalidContext(DynqError):
    pass


class NotDisjoint(DynqError):
    pass


class NotAProperColoring(DynqError):
    pass


class DegreeBoundViolated(DynqError):
    pass


class PreconditionViolated(DynqError):
    pass


class DuplicateEdge(DynqError):
    pass


class UnknownEdgeOnDelete(DynqError):
    pass


class InfeasibleConstraint(DynqError):
    pass


class StructureViolation(DynqError):
    """Batch would break a structural promise (acyclicity, forest-ness)."""
