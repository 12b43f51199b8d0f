"""Exception hierarchy shared by every module."""


class RegsepError(ValueError):
    """Base class for all errors raised by this package."""


class AlphabetError(RegsepError):
    """A symbol or word is not drawn from the required alphabet."""


class ParameterError(RegsepError):
    """A numeric parameter is outside its allowed range."""


class ArityError(RegsepError):
    """Tuple/vector arity does not match what the operation expects."""


class FormatError(RegsepError):
    """A machine or formula is not in the form the operation requires."""


class ShapeError(RegsepError):
    """A higher-order stack does not have the expected layout."""


class UsageError(RegsepError):
    """An operation was called in a way its contract does not allow."""
