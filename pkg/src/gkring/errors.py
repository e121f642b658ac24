"""Exception hierarchy shared by every module of the engine."""

from __future__ import annotations


class GkError(Exception):
    """Base class for all engine errors."""


class FormulaSyntaxError(GkError, ValueError):
    """Malformed formula text. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class QuantifierNotSupported(FormulaSyntaxError):
    pass


class DepthTooSmall(GkError, ValueError):
    pass


class NonUniformAtom(GkError, ValueError):
    """An equality between variable terms of different path lengths survived
    unfolding, so the atom does not live on the depth-p leaves."""


class DepthBudgetExceeded(GkError):
    pass


class InconsistentDiagram(GkError, ValueError):
    pass


class NotPrimitive(GkError, ValueError):
    pass


class NotPositivePrimitive(NotPrimitive):
    pass


class InvalidFrontier(GkError, ValueError):
    pass


class NotExtended(GkError, ValueError):
    pass


class WrongShape(GkError, ValueError):
    pass


class DepthMismatch(GkError, ValueError):
    pass


class NotElementary(GkError):
    pass


class AmbientNotClosed(GkError):
    pass


class NotAFunction(GkError, ValueError):
    pass


class NotInjective(GkError, ValueError):
    pass


class DomainMismatch(GkError, ValueError):
    pass
