"""Helpers shared by the harness management commands."""
import argparse
import logging

from django.core.management.base import CommandError

from circuits.exceptions import InvariantViolation, SimulationError
from circuits.simkernel import parse_time
from .exceptions import HarnessError
from .runner import EXIT_INVARIANT_VIOLATION, EXIT_SCENARIO_ERROR

logger = logging.getLogger(__name__)


def time_argument(value):
    try:
        return parse_time(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def signed_time_argument(value):
    try:
        return parse_time(value, allow_negative=True)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def command_error(exc):
    """CommandError carrying the exit code for ``exc``."""
    if isinstance(exc, InvariantViolation):
        logger.error(f"Invariant violation: {exc}")
        return CommandError(f"Invariant violation: {exc}", returncode=EXIT_INVARIANT_VIOLATION)
    detail = getattr(exc, 'detail', None)
    message = f"{exc} {detail}" if detail else str(exc)
    return CommandError(message, returncode=EXIT_SCENARIO_ERROR)


HANDLED_ERRORS = (HarnessError, SimulationError, ValueError)
