"""Exception types shared across the package."""


class SigkitError(Exception):
    """Base class for all sigkit errors."""


class InvalidLetterError(SigkitError, ValueError):
    """A letter lies outside the alphabet (1..d in user-facing terms)."""


class CapacityError(SigkitError, OverflowError):
    """A word or word set exceeds the 64-bit code capacity."""


class CorruptWordError(SigkitError, ValueError):
    """A word's integer code is inconsistent with its length."""


class WordRangeError(SigkitError, ValueError):
    """A prefix or suffix length lies outside [0, |w|]."""


class DomainError(SigkitError, ValueError):
    """A parameter violates its domain (weights, depths, empty inputs)."""


class ShapeError(SigkitError, ValueError):
    """An array shape is inconsistent with the expected batch layout."""


class WindowError(SigkitError, ValueError):
    """Window indices violate 0 <= l < r <= M."""


class UnsupportedWordSetError(SigkitError, ValueError):
    """The operation requires a fully truncated word set."""
