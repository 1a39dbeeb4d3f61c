"""Exception hierarchy shared by every module."""


class NullRingError(Exception):
    """Base class for all library errors."""


class InvalidBaseError(NullRingError, ValueError):
    """A custom base set is malformed or violates its declared log-density bound."""


class CapacityError(NullRingError):
    """A computation would exceed a configured resource cap."""


class CapExceededError(CapacityError):
    """A search (gap, certificate) ran to its cap without finding a witness."""


class RangeError(NullRingError, IndexError):
    """A query falls outside the tabulated range."""


class PositionNotInSumsetError(NullRingError, ValueError):
    def __init__(self, position: int, n: int):
        super().__init__(f"position {position} is not in {n}S")
        self.position = position
        self.n = n


class DigitOutOfRangeError(NullRingError, ValueError):
    def __init__(self, position: int, digit: int, t: int):
        super().__init__(f"digit {digit} at position {position} outside [-{t}, {t}]")
        self.position = position
        self.digit = digit
        self.t = t


class CertificationError(NullRingError):
    """A certified computation could not confirm what the theory guarantees."""
