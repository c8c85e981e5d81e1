"""Exception hierarchy shared by all modules."""


class AOLError(Exception):
    """Base class for every error raised by this package."""


class InvalidClass(AOLError, ValueError):
    pass


class EmptyClass(InvalidClass):
    pass


class AllEmptyHypothesis(InvalidClass):
    pass


class DuplicateHypothesis(InvalidClass):
    pass


class IndexOutOfRange(AOLError, IndexError):
    pass


class AlphabetTooLarge(AOLError, ValueError):
    pass


class LengthMismatch(AOLError, ValueError):
    pass


class ParseError(AOLError, ValueError):
    pass


class OutOfRange(AOLError, ValueError):
    pass


class NotALeaf(AOLError, ValueError):
    pass


class InvalidTree(AOLError, ValueError):
    pass


class InvalidClassicalTree(InvalidTree):
    pass


class RankTooSmall(AOLError, ValueError):
    pass


class InternalInconsistency(AOLError, AssertionError):
    pass


class UnrealizableHistory(AOLError, ValueError):
    pass


class InconsistentHistory(UnrealizableHistory):
    pass


class IncompatibleTrace(AOLError, ValueError):
    pass


class HorizonExceeded(AOLError, ValueError):
    pass


class InvalidMu(AOLError, ValueError):
    pass


class InvalidDistribution(AOLError, ValueError):
    pass


class BudgetExceeded(AOLError, RuntimeError):
    pass


class NotFittedError(AOLError, AttributeError):
    pass
