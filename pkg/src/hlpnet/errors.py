"""Exception hierarchy.

A ``False`` verdict from the guard is data; everything here aborts.
"""


class HLPNError(Exception):
    pass


class StructuralError(HLPNError, ValueError):
    """Ill-formed input: unknown ids, mismatched universes, broken nets."""


class UnderflowError(HLPNError, ArithmeticError):
    """A bag subtraction would produce a negative count."""


class SemanticsError(HLPNError):
    """Firing something that is not enabled."""


class CapacityError(HLPNError):
    """A placement puts more robots in a cell than it can hold."""


class StateBoundExceeded(HLPNError):
    """An explicit state space or automaton product grew past its bound."""


class LTLSyntaxError(HLPNError, ValueError):
    def __init__(self, message, pos=None, text=None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class InputError(HLPNError):
    """A file could not be loaded; the message carries file and location."""
