"""
Tunable delay element model.

A line is a row of identical delay units sharing one bias voltage. The bias
sets the delay through a calibration table; every unit a pulse traverses
also eats a fixed slice of its width, and pulses that get too thin vanish.
"""
import logging
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .conf import supply_mv
from .exceptions import BiasOutOfRange, TapOutOfRange
from .simkernel import NS, Component, Level, Pulse

logger = logging.getLogger(__name__)

# (bias mV, delay of the full 8-unit line in ps); flat above 1.18 V
DEFAULT_CALIBRATION_POINTS = (
    (700, 60 * NS),
    (950, 40 * NS),
    (1180, 20 * NS),
    (1800, 20 * NS),
)


@dataclass(frozen=True)
class BiasCalibration:
    points: tuple = DEFAULT_CALIBRATION_POINTS
    units: int = 8

    def __post_init__(self):
        points = tuple(sorted((int(mv), int(ps)) for mv, ps in self.points))
        if len(points) < 2:
            raise ValueError("A calibration needs at least two points")
        biases = [mv for mv, _ in points]
        if len(set(biases)) != len(biases):
            raise ValueError("Calibration biases must be distinct")
        if any(later > earlier for (_, earlier), (_, later) in zip(points, points[1:])):
            raise ValueError("Calibrated delay must not increase with bias")
        object.__setattr__(self, 'points', points)

    @property
    def min_bias(self):
        return self.points[0][0]

    @property
    def max_bias(self):
        return self.points[-1][0]

    def line_delay_for_bias(self, bias_mV, supply_mV=None):
        """Delay of the full calibrated line at ``bias_mV``, in ps."""
        supply = supply_mv() if supply_mV is None else supply_mV
        if bias_mV < self.min_bias:
            raise BiasOutOfRange(
                f"{bias_mV} mV is below the calibrated range (weak inversion starts under {self.min_bias} mV)"
            )
        if bias_mV > supply or bias_mV > self.max_bias:
            raise BiasOutOfRange(f"{bias_mV} mV is above the supply or the calibrated range")
        biases, delays = zip(*self.points)
        return int(round(float(np.interp(bias_mV, biases, delays))))

    def unit_delay(self, bias_mV, supply_mV=None):
        return int(round(self.line_delay_for_bias(bias_mV, supply_mV) / self.units))

    @classmethod
    def from_points(cls, points, units=8):
        return cls(tuple(tuple(point) for point in points), units)


def line_delay_for_bias(calibration, bias_mV):
    return calibration.line_delay_for_bias(bias_mV)


@dataclass(frozen=True)
class TunableDelayLine:
    """A row of ``n_units`` delay units with taps every ``units_per_tap`` units."""
    bias_mV: int = 700
    n_units: int = 8
    units_per_tap: int = 2
    width_shrink_per_unit: int = 250
    min_propagable_width: int = 1 * NS
    calibration: BiasCalibration = field(default_factory=BiasCalibration)

    def __post_init__(self):
        if self.n_units <= 0 or self.units_per_tap <= 0:
            raise ValueError("A delay line needs a positive unit count and tap spacing")
        # validates the bias
        self.calibration.line_delay_for_bias(self.bias_mV)

    @property
    def unit_delay(self):
        return self.calibration.unit_delay(self.bias_mV)

    @property
    def tap_count(self):
        return self.n_units // self.units_per_tap

    def with_bias(self, bias_mV):
        return replace(self, bias_mV=bias_mV)

    def units_for_tap(self, tap_index):
        if not 1 <= tap_index <= self.tap_count:
            raise TapOutOfRange(f"Tap {tap_index} is outside 1..{self.tap_count}")
        return tap_index * self.units_per_tap

    def tap_delay(self, tap_index):
        return self.units_for_tap(tap_index) * self.unit_delay

    def surviving_width(self, width, n_units):
        remaining = width - n_units * self.width_shrink_per_unit
        return remaining if remaining >= self.min_propagable_width else None

    def propagate(self, pulse, n_units):
        """The pulse after ``n_units`` units, or None if it did not survive."""
        if not 0 <= n_units <= self.n_units:
            raise TapOutOfRange(f"Cannot traverse {n_units} units of a {self.n_units}-unit line")
        if n_units == 0:
            return pulse
        width = self.surviving_width(pulse.width, n_units)
        if width is None:
            return None
        return Pulse(pulse.rise + n_units * self.unit_delay, width)

    def tap_pulse(self, pulse, tap_index):
        return self.propagate(pulse, self.units_for_tap(tap_index))


@dataclass
class _InFlight:
    rise: int
    delays: dict
    rise_events: dict


class DelayLineComponent(Component):
    """
    Event-level view of a TunableDelayLine.

    ``outputs`` maps an output net to the number of units traversed before it.
    Delays are frozen when a pulse enters, so retuning the bias only affects
    later pulses.
    """

    def __init__(self, sim, name, line, input, outputs):
        super().__init__(sim, name)
        self.line = line
        self.input = input
        self.outputs = dict(outputs)
        for units in self.outputs.values():
            if not 0 <= units <= line.n_units:
                raise TapOutOfRange(f"{name}: output after {units} units is outside the line")
        self._in_flight = deque()
        sim.watch(input, self._on_input)

    def retune(self, bias_mV):
        self.line = self.line.with_bias(bias_mV)
        logger.debug("%s retuned to %d mV (unit delay %d ps)", self.name, bias_mV, self.line.unit_delay)

    def _on_input(self, net):
        now = self.sim.now
        if net.level is Level.HIGH:
            unit = self.line.unit_delay
            delays = {out: units * unit for out, units in self.outputs.items()}
            events = {out: self.sim.set_at(now + delay, out, Level.HIGH) for out, delay in delays.items()}
            self._in_flight.append(_InFlight(now, delays, events))
            return
        if not self._in_flight:
            return
        flight = self._in_flight.popleft()
        width = now - flight.rise
        for out, units in self.outputs.items():
            remaining = self.line.surviving_width(width, units) if units else width
            rise_event = flight.rise_events[out]
            if remaining is None and not rise_event.cancelled and rise_event.time > now:
                self.sim.cancel(rise_event)
                logger.debug("%s: pulse of %d ps lost before %s", self.name, width, out)
                continue
            fall = flight.rise + flight.delays[out] + (remaining if remaining is not None else width)
            self.sim.set_at(max(fall, now), out, Level.LOW)
