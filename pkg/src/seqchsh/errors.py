"""Exception hierarchy shared by all modules."""


class SeqChshError(Exception):
    """Base class for errors raised by seqchsh."""


class DimensionError(SeqChshError, ValueError):
    """Operand shapes disagree or exceed the joint-space cap."""


class DomainError(SeqChshError, ValueError):
    """An argument lies outside the range an operation accepts."""


class SpecError(SeqChshError, ValueError):
    """Malformed Schmidt specification (bad weights, dims, strict-mode failure)."""


class NumericConsistencyError(SeqChshError, ArithmeticError):
    """A numerical invariant (trace, Hermiticity, PSD, Tsirelson cap) was violated."""
