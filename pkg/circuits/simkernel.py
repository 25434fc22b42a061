"""
Deterministic discrete-event simulation core.

Time is an integer number of picoseconds. Nets carry two-valued levels and
start LOW. Events are delivered in (time, seq) order, where seq is a
per-simulation insertion counter, so equal-time events resolve FIFO.
"""
import heapq
import itertools
import logging
import re
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Optional

from .conf import livelock_bound, supply_mv
from .exceptions import LivelockDetected, OverlappingDrive, PastEvent, UntracedNet

logger = logging.getLogger(__name__)

PS = 1
NS = 1000
US = 1000 * NS

_TIME_UNITS = {'ps': PS, 'ns': NS, 'us': US}
_TIME_RE = re.compile(r'^\s*(-?\d+(?:\.\d+)?)\s*(ps|ns|us)?\s*$')


def ns(value):
    """Nanoseconds to integer picoseconds."""
    return int(round(value * NS))


def parse_time(value, allow_negative=False):
    """
    Parse a time given as integer picoseconds or a string with a unit.

    Accepts ``10000``, ``"10ns"``, ``"2.5ns"``, ``"500ps"`` and ``"1us"``.
    A bare number in a string is read as picoseconds.
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a time value: {value!r}")
    if isinstance(value, int):
        ps = value
    elif isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"Fractional picoseconds are not representable: {value!r}")
        ps = int(value)
    elif isinstance(value, str):
        match = _TIME_RE.match(value)
        if not match:
            raise ValueError(f"Not a time value: {value!r}")
        number, unit = match.groups()
        scaled = float(number) * _TIME_UNITS[unit or 'ps']
        if abs(scaled - round(scaled)) > 1e-6:
            raise ValueError(f"Time {value!r} is not a whole number of picoseconds")
        ps = int(round(scaled))
    else:
        raise ValueError(f"Not a time value: {value!r}")
    if ps < 0 and not allow_negative:
        raise ValueError(f"Time must be non-negative: {value!r}")
    return ps


def format_time(ps):
    """Render picoseconds the way scenario files write them."""
    if ps % NS == 0:
        return f"{ps // NS}ns"
    return f"{ps / NS:g}ns"


def elapsed(later, earlier):
    """Difference of two times; a negative result is an error, never a wrap."""
    if later < earlier:
        raise ValueError(f"Time underflow: {later} - {earlier}")
    return later - earlier


class Level(IntEnum):
    LOW = 0
    HIGH = 1

    @property
    def inverted(self):
        return Level.LOW if self is Level.HIGH else Level.HIGH

    @classmethod
    def of(cls, value):
        return cls.HIGH if value else cls.LOW


@dataclass(frozen=True)
class Pulse:
    """One HIGH interval of a net: [rise, rise + width)."""
    rise: int
    width: int
    open_ended: bool = False

    def __post_init__(self):
        if self.rise < 0:
            raise ValueError(f"Pulse rise must be non-negative, got {self.rise}")
        if self.width <= 0 and not self.open_ended:
            raise ValueError(f"Pulse width must be positive, got {self.width}")

    @property
    def fall(self):
        return self.rise + self.width

    def intersects(self, other):
        """Closed-interval test: abutting pulses intersect."""
        return self.rise <= other.fall and other.rise <= self.fall

    def shifted(self, delay):
        return Pulse(self.rise + delay, self.width, self.open_ended)


@dataclass
class Net:
    id: str
    level: Level = Level.LOW
    trace_enabled: bool = True
    transitions: list = field(default_factory=list)
    listeners: list = field(default_factory=list, repr=False)


@dataclass(order=True)
class Event:
    time: int
    seq: int
    net: Optional[str] = field(default=None, compare=False)
    new_level: Optional[Level] = field(default=None, compare=False)
    action: Optional[Callable] = field(default=None, compare=False, repr=False)
    cancelled: bool = field(default=False, compare=False)


class Simulation:
    """
    One single-threaded simulation run.

    Components subscribe to nets with ``watch`` and react to level changes by
    scheduling further events. Instances share nothing, so sweeps run one
    instance per worker.
    """

    def __init__(self, supply_mV=None, livelock_limit=None, trace=True, name='sim'):
        self.name = name
        self.now = 0
        self.supply_mV = supply_mv() if supply_mV is None else supply_mV
        self.livelock_limit = livelock_bound() if livelock_limit is None else livelock_limit
        self.trace_default = trace
        self.nets = {}
        self.components = []
        self.analog = {}
        self._pending = []
        self._seq = itertools.count()
        self._driven = {}
        self._burst_time = -1
        self._burst_count = 0
        self.started = False

    # -- nets -------------------------------------------------------------

    def net(self, net_id, trace=None):
        """Return the named net, creating it LOW on first use."""
        net = self.nets.get(net_id)
        if net is None:
            net = Net(net_id, trace_enabled=self.trace_default if trace is None else trace)
            self.nets[net_id] = net
        return net

    def level(self, net_id):
        return self.net(net_id).level

    def is_high(self, net_id):
        return self.net(net_id).level is Level.HIGH

    def watch(self, net_id, callback):
        """Call ``callback(net)`` after every level change of the net."""
        self.net(net_id).listeners.append(callback)

    def add_component(self, component):
        self.components.append(component)
        return component

    def initialize(self, net_id, level):
        """
        Set a power-up level before the first event runs.

        Listeners are notified immediately, so combinational logic settles
        at t=0 without scheduling glitches.
        """
        if self.started:
            raise PastEvent(f"Cannot initialize {net_id} after the simulation started")
        self._apply(net_id, Level.of(level))

    # -- scheduling -------------------------------------------------------

    def event(self, time, net_id=None, new_level=None, action=None):
        """Build an event carrying the next insertion sequence number."""
        return Event(time, next(self._seq), net_id, new_level, action)

    def schedule(self, event):
        if event.time < self.now:
            raise PastEvent(f"Event at {event.time} ps scheduled at now={self.now} ps")
        heapq.heappush(self._pending, event)
        return event

    def set_at(self, time, net_id, level):
        return self.schedule(self.event(time, net_id, Level.of(level)))

    def set_after(self, delay, net_id, level):
        return self.set_at(self.now + delay, net_id, level)

    def call_at(self, time, action):
        return self.schedule(self.event(time, action=action))

    @staticmethod
    def cancel(event):
        event.cancelled = True

    def drive_pulse(self, net_id, pulse):
        """Drive one externally generated pulse onto a net."""
        if pulse.rise < self.now:
            raise PastEvent(f"Pulse on {net_id} rises at {pulse.rise} ps, now={self.now} ps")
        driven = self._driven.setdefault(net_id, [])
        for other in driven:
            if pulse.intersects(other):
                raise OverlappingDrive(
                    f"Pulse {pulse} on {net_id} intersects already driven pulse {other}"
                )
        driven.append(pulse)
        self.set_at(pulse.rise, net_id, Level.HIGH)
        self.set_at(pulse.fall, net_id, Level.LOW)

    @property
    def pending(self):
        return sum(1 for event in self._pending if not event.cancelled)

    def next_event_time(self):
        while self._pending and self._pending[0].cancelled:
            heapq.heappop(self._pending)
        return self._pending[0].time if self._pending else None

    # -- running ----------------------------------------------------------

    def run_until(self, t):
        """Process every event with time <= t, then advance ``now`` to t."""
        if t < self.now:
            raise PastEvent(f"Cannot run back to {t} ps from now={self.now} ps")
        self.started = True
        while self._pending and self._pending[0].time <= t:
            event = heapq.heappop(self._pending)
            if event.cancelled:
                continue
            self._advance(event.time)
            if event.action is not None:
                event.action()
            else:
                self._apply(event.net, event.new_level)
        self._advance(t)

    def run_until_quiet(self, limit):
        """Run until no events are pending or ``limit`` is reached; return the stop time."""
        while True:
            upcoming = self.next_event_time()
            if upcoming is None or upcoming > limit:
                return self.now
            self.run_until(upcoming)

    def _advance(self, time):
        if time != self._burst_time:
            self._burst_time = time
            self._burst_count = 0
        else:
            self._burst_count += 1
            if self._burst_count > self.livelock_limit:
                raise LivelockDetected(
                    f"More than {self.livelock_limit} events at t={time} ps without time advancing"
                )
        self.now = time

    def _apply(self, net_id, level):
        net = self.net(net_id)
        if net.level is level:
            return
        net.level = level
        if net.trace_enabled:
            self._record(net, level)
        for callback in list(net.listeners):
            callback(net)

    def _record(self, net, level):
        transitions = net.transitions
        # a glitch inside one timestamp collapses instead of producing equal times
        if transitions and transitions[-1][0] == self.now:
            transitions.pop()
        previous = transitions[-1][1] if transitions else Level.LOW
        if previous is not level:
            transitions.append((self.now, level))

    # -- observation ------------------------------------------------------

    def record_value(self, name, value):
        """Record a stepwise (analog-valued) series such as a bias voltage."""
        series = self.analog.setdefault(name, [])
        if series and series[-1][0] == self.now:
            series.pop()
        if not series or series[-1][1] != value:
            series.append((self.now, value))

    def pulses_of(self, net_id):
        net = self.net(net_id)
        if not net.trace_enabled:
            raise UntracedNet(f"Tracing is disabled for net {net_id}")
        pulses = []
        rise = None
        for time, level in net.transitions:
            if level is Level.HIGH:
                rise = time
            elif rise is not None:
                pulses.append(Pulse(rise, time - rise))
                rise = None
        if rise is not None:
            pulses.append(Pulse(rise, self.now - rise, open_ended=True))
        return pulses

    def traces(self):
        """Transition lists of every traced net, keyed by net name."""
        return {
            net_id: list(net.transitions)
            for net_id, net in self.nets.items()
            if net.trace_enabled
        }


class Component:
    """Base for anything wired into a Simulation."""

    def __init__(self, sim, name):
        self.sim = sim
        self.name = name
        sim.add_component(self)

    def drive(self, net_id, level, delay):
        """Drive a net after ``delay``, or settle it directly during power-up."""
        if self.sim.started:
            return self.sim.set_after(delay, net_id, level)
        self.sim.initialize(net_id, level)
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"
