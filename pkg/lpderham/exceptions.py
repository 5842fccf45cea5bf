"""Exceptions raised across lpderham.

``CheckFailed`` and its subclasses carry a ``witness`` dict that the driver
writes out verbatim; everything else is a plain precondition failure.
"""


class DerhamError(Exception):
    """Base class for all lpderham errors."""


class SchemaError(DerhamError, ValueError):
    """A scene or payload does not match the declared schema."""


class DimensionMismatch(DerhamError, ValueError):
    pass


class NonClosedFormError(DerhamError, ValueError):
    pass


class DegenerateInputError(DerhamError, ValueError):
    pass


class QuadratureError(DerhamError, RuntimeError):
    pass


class CheckFailed(DerhamError):
    """A mathematical check failed; ``witness`` says where."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness if witness is not None else {}


class NonzeroPeriodError(CheckFailed):
    """A closed form has a nonzero period, so it has no global primitive."""

    def __init__(self, message, cycle, period):
        payload = cycle.to_json() if hasattr(cycle, 'to_json') else cycle
        super().__init__(message, witness={'cycle': payload, 'period': period})
        self.cycle = cycle
        self.period = period
