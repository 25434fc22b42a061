"""
Error types raised by the simulator.

Every error derives from SimulationError so callers (the harness and the
management commands) can catch simulator failures in one place.
"""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class PastEvent(SimulationError):
    """An event was scheduled earlier than the current simulation time."""


class LivelockDetected(SimulationError):
    """Too many events were processed without simulated time advancing."""


class OverlappingDrive(SimulationError):
    """A driven pulse intersects a pulse already scheduled on the same net."""


class UntracedNet(SimulationError):
    """Pulses were requested for a net whose tracing is disabled."""


class ArityMismatch(SimulationError):
    """A gate got a number of inputs its kind does not accept."""


class BiasOutOfRange(SimulationError):
    """A bias voltage lies outside the calibrated range."""


class TapOutOfRange(SimulationError):
    """A tap index does not name a tap of the delay line."""


class OutOfSpan(SimulationError):
    """An offset lies beyond what the coincidence detector can resolve."""


class TimingViolation(SimulationError):
    """Stimuli break the timing envelope a design is specified for."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class InvariantViolation(SimulationError):
    """A structural invariant of a design was found broken."""


class NotOneHot(InvariantViolation):
    """The tap latches of Design A are not exactly one-hot."""


class AlreadyTrained(SimulationError):
    """Design B can only be trained once."""


class Untrained(SimulationError):
    """Detection was requested from a Design B device that was never trained."""
