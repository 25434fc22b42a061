import logging

from celery import shared_task

from .sweep import evaluate_offset

logger = logging.getLogger(__name__)


@shared_task
def evaluate_sweep_row(offset, width, mirrored=False):
    """
    Evaluate one sweep offset on a fresh Design B device.

    Each call builds its own simulation, so rows can run on any worker in
    any order.
    """
    row = evaluate_offset(offset, width, mirrored)
    logger.debug(f"Sweep row {offset} ps -> {row['decision']}")
    return row
