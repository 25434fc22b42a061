"""Errors raised by the harness on top of the simulator's own."""


class HarnessError(Exception):
    """Base class for harness errors."""


class SchemaError(HarnessError):
    """A scenario does not validate; ``detail`` carries the field errors."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class OddLengthStream(HarnessError):
    """A symbol stream cannot be framed into pairs."""


class ExportError(HarnessError):
    """A trace file could not be written."""
