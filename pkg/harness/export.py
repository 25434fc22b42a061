"""
Trace export.

Both formats are byte-identical for identical simulations: nets are written
in name order and no wall-clock date enters the files.
"""
import csv
import logging

from vcd import VCDWriter

from circuits.simkernel import Level
from .exceptions import ExportError

logger = logging.getLogger(__name__)

VCD_DATE = 'seqlearn'


def _last_time(traces, analog):
    times = [t for transitions in traces.values() for t, _ in transitions]
    times += [t for series in (analog or {}).values() for t, _ in series]
    return max(times, default=0)


def export_vcd(traces, path, analog=None, end=None):
    """
    Write traced nets (and stepwise analog series) as a VCD file.

    ``traces`` maps net names to ``(time_ps, Level)`` lists as returned by
    ``Simulation.traces()``; ``analog`` maps names to ``(time_ps, value)``.
    """
    analog = analog or {}
    close_at = max(_last_time(traces, analog), end or 0)
    try:
        with open(path, 'w') as fh:
            writer = VCDWriter(fh, timescale='1 ps', date=VCD_DATE, comment='seqlearn trace')
            changes = []
            for name in sorted(traces):
                transitions = traces[name]
                init = 0
                if transitions and transitions[0][0] == 0:
                    init = int(transitions[0][1])
                    transitions = transitions[1:]
                var = writer.register_var('top', name, 'wire', size=1, init=init)
                changes.extend((t, name, var, int(level)) for t, level in transitions)
            for name in sorted(analog):
                series = analog[name]
                init = float(series[0][1]) if series and series[0][0] == 0 else 0.0
                var = writer.register_var('top', name, 'real', init=init)
                changes.extend((t, name, var, float(value)) for t, value in series if t > 0)
            for t, _name, var, value in sorted(changes, key=lambda c: (c[0], c[1])):
                writer.change(var, t, value)
            writer.close(close_at)
    except OSError as exc:
        raise ExportError(f"Could not write VCD file {path}: {exc}") from exc
    logger.info("Wrote %d nets to %s", len(traces), path)
    return path


def export_csv(traces, path):
    """Write every transition as a ``time_ps,net,level`` row, ordered by time then net."""
    rows = sorted(
        (t, name, int(level is Level.HIGH))
        for name, transitions in traces.items()
        for t, level in transitions
    )
    try:
        with open(path, 'w', newline='') as fh:
            writer = csv.writer(fh)
            writer.writerow(['time_ps', 'net', 'level'])
            writer.writerows(rows)
    except OSError as exc:
        raise ExportError(f"Could not write CSV file {path}: {exc}") from exc
    logger.info("Wrote %d transitions to %s", len(rows), path)
    return path
