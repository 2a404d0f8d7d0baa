"""Exception hierarchy shared by every module."""


class TNZError(ValueError):
    """Base class; the CLI maps any subclass to exit code 2."""


# structural
class DimensionMismatch(TNZError):
    pass


class SlotReuse(TNZError):
    pass


class IndexOutOfRange(TNZError):
    pass


class UnknownNode(TNZError):
    pass


class DuplicateNode(TNZError):
    pass


# contraction / evaluation
class UnknownEdge(TNZError):
    pass


class NotClosed(TNZError):
    pass


class NotTotal(TNZError):
    pass


class LengthMismatch(TNZError):
    pass


class TooLarge(TNZError):
    pass


# reductions
class InvalidFormula(TNZError):
    pass


class InvalidGraph(TNZError):
    pass


class EmptyNetwork(TNZError):
    pass


class TooSmall(TNZError):
    pass


class InvalidInstance(TNZError):
    pass


class SupportOutOfRange(TNZError):
    pass


class GuessRejected(TNZError):
    pass


# certificates
class NotNonNegative(TNZError):
    pass


class InvalidWitness(TNZError):
    pass


class NotAPartition(TNZError):
    pass


class DisconnectedBlock(TNZError):
    pass


class NoPhysicalEdge(TNZError):
    pass


class NotInjective(TNZError):
    pass


class SolveFailed(RuntimeError):
    """Raised when an exact solve that must succeed does not; always a bug."""


class OutOfRange(TNZError):
    pass


# hamiltonians
class MalformedTerm(TNZError):
    pass


class MalformedGuess(TNZError):
    pass


class NotStoquastic(TNZError):
    pass


class NotCommuting(TNZError):
    pass


# file formats
class ParseError(TNZError):
    pass
