"""Exception types raised by :mod:`hmpbounds`."""


class ParameterError(ValueError):
    """A process parameter is outside the accepted range.

    ``field`` names the offending parameter (``"pi01"``, ``"pi10"``, ``"eps"``).
    """

    def __init__(self, field, message):
        super().__init__(message)
        self.field = field


class LengthError(ValueError):
    """An observation string or depth exceeds the configured limit."""


class CapacityError(RuntimeError):
    """Tree expansion would exceed the node budget or the hard depth cap."""


class InsufficientDataError(ValueError):
    """Sample path too short for the requested block length."""
