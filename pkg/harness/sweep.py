"""
Design B training sweeps.

Every offset is evaluated on a fresh device: one training presentation,
then (unless training failed) one detect presentation at the same offset.
"""
import csv
import logging
from collections import Counter
from dataclasses import dataclass, field

from django.db import transaction

from circuits.conf import setting
from circuits.design_b import DesignB, DesignBConfig
from circuits.outcomes import BiasDecision, OutcomeKind
from circuits.simkernel import NS, format_time
from .exceptions import ExportError
from .models import SweepRow, SweepRun

logger = logging.getLogger(__name__)

CSV_FIELDS = [
    'offset_ps', 'decision', 'bias_mV', 'trained_delay_ps', 'detect_ok', 'suppressed_20ns', 'latch_20ns_set',
]


def evaluate_offset(offset, width=10 * NS, mirrored=False):
    """Train a fresh Design B device on ``offset`` and detect it once; return the row as a dict."""
    device = DesignB(DesignBConfig(mirrored=mirrored))
    decision = device.present_offset(offset, width).kind
    detect_ok = False
    if decision is not BiasDecision.FAILED:
        detect_ok = device.present_offset(offset, width).kind is OutcomeKind.RECOGNIZED
    device.check_invariants()

    latch_20ns_set = bool(device.sim.pulses_of('latch_20ns'))
    near_fired = bool(device.sim.pulses_of('near_hit'))
    return {
        'offset_ps': offset,
        'decision': decision.value,
        'bias_mV': device.current_bias(),
        'trained_delay_ps': device.trained_delay(),
        'detect_ok': detect_ok,
        'suppressed_20ns': near_fired and not latch_20ns_set,
        'latch_20ns_set': latch_20ns_set,
    }


def sweep_offsets(start, end, step):
    """Offsets start, start + step, ... up to and including ``end``; empty when start >= end."""
    if step <= 0:
        raise ValueError("Sweep step must be positive")
    if start >= end:
        return []
    return list(range(start, end + 1, step))


@dataclass
class SweepTable:
    start: int
    end: int
    step: int
    width: int = 10 * NS
    mirrored: bool = False
    rows: list = field(default_factory=list)

    def counts(self):
        return Counter(row['decision'] for row in self.rows)

    def decisions(self):
        return {row['offset_ps']: row['decision'] for row in self.rows}

    def offsets_with(self, decision):
        value = decision.value if isinstance(decision, BiasDecision) else decision
        return [row['offset_ps'] for row in self.rows if row['decision'] == value]


def _evaluate_parallel(offsets, width, mirrored):
    from celery import group
    from .tasks import evaluate_sweep_row

    job = group(evaluate_sweep_row.s(offset, width, mirrored) for offset in offsets)
    return job.apply_async().get()


def sweep_design_b(start, end, step, width=10 * NS, workers=None, mirrored=False):
    """Evaluate every offset of the sweep; rows come back in offset order."""
    offsets = sweep_offsets(start, end, step)
    workers = setting('SWEEP_WORKERS', 1) if workers is None else workers
    table = SweepTable(start, end, step, width, mirrored)
    if not offsets:
        logger.info("Empty sweep %s..%s", format_time(start), format_time(end))
        return table

    if workers > 1:
        logger.info("Dispatching %d sweep rows through Celery", len(offsets))
        rows = _evaluate_parallel(offsets, width, mirrored)
    else:
        rows = [evaluate_offset(offset, width, mirrored) for offset in offsets]
    table.rows = sorted(rows, key=lambda row: row['offset_ps'])

    counts = table.counts()
    logger.info(
        "Swept %d offsets: %s",
        len(table.rows), ', '.join(f"{name}={counts[name]}" for name in sorted(counts)),
    )
    return table


def write_sweep_csv(table, path):
    try:
        with open(path, 'w', newline='') as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            writer.writerows(table.rows)
    except OSError as exc:
        raise ExportError(f"Could not write sweep CSV {path}: {exc}") from exc
    logger.info("Wrote %d sweep rows to %s", len(table.rows), path)
    return path


def format_table(table):
    """Human-readable table, one line per offset."""
    header = f"{'offset':>9}  {'decision':<13} {'bias':>7}  {'delay':>7}  {'detect':<6} suppressed"
    lines = [header, '-' * len(header)]
    for row in table.rows:
        lines.append(
            f"{format_time(row['offset_ps']):>9}  {row['decision']:<13} {row['bias_mV']:>4} mV"
            f"  {format_time(row['trained_delay_ps']):>7}  {'yes' if row['detect_ok'] else 'no':<6}"
            f" {'yes' if row['suppressed_20ns'] else 'no'}"
        )
    return '\n'.join(lines)


@transaction.atomic
def save_sweep(table, design='B'):
    """Persist a sweep table as a SweepRun with its rows."""
    counts = table.counts()
    run = SweepRun.objects.create(
        design=design,
        start_ps=table.start,
        end_ps=table.end,
        step_ps=table.step,
        width_ps=table.width,
        mirrored=table.mirrored,
        count_set_20ns=counts[BiasDecision.SET_20NS.value],
        count_set_40ns=counts[BiasDecision.SET_40NS.value],
        count_keep_default=counts[BiasDecision.KEEP_DEFAULT.value],
        count_failed=counts[BiasDecision.FAILED.value],
    )
    SweepRow.objects.bulk_create([
        SweepRow(
            run=run,
            offset_ps=row['offset_ps'],
            decision=row['decision'],
            bias_mV=row['bias_mV'],
            trained_delay_ps=row['trained_delay_ps'],
            detect_ok=row['detect_ok'],
            suppressed_20ns=row['suppressed_20ns'],
        )
        for row in table.rows
    ])
    logger.info("Saved sweep run %d with %d rows", run.pk, len(table.rows))
    return run
