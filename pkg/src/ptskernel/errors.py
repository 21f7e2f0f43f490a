"""Exception hierarchy shared by every checker in the package."""


class KernelError(Exception):
    """Base class for all errors raised by ptskernel."""


class FuelExhausted(KernelError):
    """A conversion or normalization did not finish within its step budget.

    This is an "unknown" outcome and must never be read as acceptance or
    rejection.
    """


class BudgetExhausted(KernelError):
    """The declarative derivation search ran out of budget."""


class IllFormedTerm(KernelError):
    """A term violates a structural invariant (e.g. a dangling index)."""


class NonFunctionalSpec(KernelError):
    """A syntax-directed checker was handed a non-functional PTS."""


class TypingError(KernelError):
    """The judgment is not derivable. Subclasses name the failing rule."""


class UnboundVariable(TypingError):
    pass


class NoAxiom(TypingError):
    pass


class AmbiguousAxiom(TypingError):
    pass


class NoRule(TypingError):
    pass


class NotAFunction(TypingError):
    pass


class DomainMismatch(TypingError):
    pass


class IllegalDomain(TypingError):
    pass


class IllegalCodomain(TypingError):
    pass


class TagNotASort(TypingError):
    pass


class SideConditionViolated(TypingError):
    """An eigenvariable would escape its binder (it occurs in some tag)."""


class NotASort(TypingError):
    pass


class TagMismatch(TypingError):
    pass


class PiMismatch(TypingError):
    pass


class NotConvertible(TypingError):
    pass


class SpecMismatch(TypingError):
    pass


class NotDerivable(TypingError):
    pass


class UndeclaredFreeVariable(TypingError):
    pass


class CyclicTags(KernelError):
    pass


class ParseError(KernelError):
    """Malformed surface syntax. ``span`` is a (start, end) offset pair."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span

    def __str__(self):
        msg = super().__str__()
        if self.span is not None:
            return f"{msg} at {self.span[0]}:{self.span[1]}"
        return msg


class UnboundName(ParseError):
    pass
