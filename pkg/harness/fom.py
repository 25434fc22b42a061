"""
Throughput figures of merit.

An operation is training a sequence, detecting a sequence or resetting the
device. The detect period is measured by simulating back-to-back
recognitions on a trained device and taking the mean spacing of the
first-input rises; every measured operation must be recognized.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from circuits.conf import setting
from circuits.design_a import DesignA
from circuits.design_b import DesignB
from circuits.exceptions import InvariantViolation
from circuits.outcomes import BiasDecision
from circuits.simkernel import NS
from .decoder import train_device

logger = logging.getLogger(__name__)

PS_PER_SECOND = 10 ** 12


class FomMode(Enum):
    SEQUENTIAL = 'sequential'
    OVERLAPPED = 'overlapped'


# reference throughputs of the transistor-level designs, ops/s
EXPECTED_OPS = {
    ('A', FomMode.SEQUENTIAL): 1.3e7,
    ('A', FomMode.OVERLAPPED): 3.1e7,
    ('B', FomMode.SEQUENTIAL): 1.1e7,
}

DEFINITION = "operation = one training, one detection or one reset; period = mean spacing of detect operations"


@dataclass(frozen=True)
class FomReport:
    design: str
    mode: FomMode
    op_period: int
    ops_per_second: Fraction
    operations: int
    reset_period: Optional[int] = None
    note: str = DEFINITION

    @property
    def expected(self):
        return EXPECTED_OPS.get((self.design, self.mode))

    @property
    def deviation(self):
        if self.expected is None:
            return None
        return abs(float(self.ops_per_second) - self.expected) / self.expected

    def within_tolerance(self, tolerance=None):
        tolerance = setting('FOM_TOLERANCE', 0.25) if tolerance is None else tolerance
        return self.deviation is None or self.deviation <= tolerance

    @property
    def reset_ops_per_second(self):
        return None if not self.reset_period else Fraction(PS_PER_SECOND, self.reset_period)

    def as_dict(self):
        return {
            'design': self.design,
            'mode': self.mode.value,
            'op_period_ps': self.op_period,
            'ops_per_second': float(self.ops_per_second),
            'operations': self.operations,
            'reset_period_ps': self.reset_period,
            'expected_ops_per_second': self.expected,
            'note': self.note,
        }


def run_until_vout(device, seen, horizon):
    """Step the simulation until Vout has risen more than ``seen`` times; return that rise or None."""
    sim = device.sim
    while len(device.vout_rises) <= seen:
        upcoming = sim.next_event_time()
        if upcoming is None or upcoming > horizon:
            sim.run_until(max(sim.now, horizon))
            return None
        sim.run_until(upcoming)
    return device.vout_rises[seen]


def _sequential(device, offset, width, repetitions, pattern_delay, horizon, settle):
    starts = []
    t = device.next_start()
    for n in range(repetitions):
        later = t + max(offset, 0)
        seen = len(device.vout_rises)
        device.present(t, t + offset, width, until=later + settle)
        rise = run_until_vout(device, seen, later + horizon)
        if rise is None:
            raise InvariantViolation(f"Detect operation {n} at {t} ps was not recognized")
        starts.append(t)
        t = max(rise + 2 * NS, later + width + pattern_delay)
    return starts


def _overlapped(device, offset, width, repetitions, pattern_delay, horizon, settle=None):
    period = abs(offset) + width + pattern_delay
    first = device.next_start()
    starts = [first + n * period for n in range(repetitions)]
    seen = len(device.vout_rises)
    for n, t in enumerate(starts):
        until = starts[n + 1] if n + 1 < len(starts) else t + max(offset, 0) + horizon
        device.present(t, t + offset, width, until=until)
    rises = device.vout_rises[seen:]
    if len(rises) != repetitions:
        raise InvariantViolation(
            f"{len(rises)} recognitions for {repetitions} pipelined detect operations"
        )
    for n, (t, rise) in enumerate(zip(starts, rises)):
        if not t <= rise <= t + max(offset, 0) + horizon:
            raise InvariantViolation(f"Detect operation {n} recognized at {rise} ps, outside its window")
    return starts


def _period(starts):
    return (starts[-1] - starts[0]) // (len(starts) - 1)


def estimate_fom(design, mode, repetitions=None):
    """Measure detect throughput of a default-configured device."""
    design = design.upper()
    mode = FomMode(mode.lower()) if isinstance(mode, str) else mode
    repetitions = setting('FOM_REPETITIONS', 8) if repetitions is None else repetitions
    if repetitions < 2:
        raise ValueError("Measuring a period needs at least two operations")
    run = _sequential if mode is FomMode.SEQUENTIAL else _overlapped

    if design == 'A':
        device = DesignA()
        offset, width = 10 * NS, 10 * NS
        train_device(device, offset, width)
        horizon = device.config.latency + device.config.output_width
        starts = run(
            device, offset, width, repetitions, device.config.pattern_delay_min, horizon, device.config.latency,
        )
        reset_start = device.next_start()
        reset_period = device.reset(at=reset_start) - reset_start
        device.check_invariants()
    elif design == 'B':
        device = DesignB()
        offset, width = 45 * NS, 10 * NS
        if device.present_offset(offset, width).kind is not BiasDecision.SET_40NS:
            raise InvariantViolation(f"Design B did not train on {offset} ps")
        line = device.config.calibration.line_delay_for_bias(device.config.default_bias_mV)
        horizon = line + device.config.a_path_delay + device.config.cd.span + 2 * device.config.cd.clock_period
        starts = run(device, offset, width, repetitions, device.config.pattern_delay_min, horizon, width)
        reset_period = None
        device.check_invariants()
    else:
        raise ValueError(f"Unknown design {design!r}")

    period = _period(starts)
    report = FomReport(
        design=design,
        mode=mode,
        op_period=period,
        ops_per_second=Fraction(PS_PER_SECOND, period),
        operations=len(starts),
        reset_period=reset_period,
    )
    logger.info(
        "Design %s %s: period %d ps, %.3g ops/s", design, mode.value, period, float(report.ops_per_second),
    )
    return report
