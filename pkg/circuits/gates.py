"""
Behavioral logic primitives wired into a Simulation.

Every primitive reacts to level changes on its input nets and drives its
output after a propagation delay (transport delay, default
``SIM_GATE_DELAY_PS``).
"""
import logging
from enum import Enum

from .conf import gate_delay
from .exceptions import ArityMismatch
from .simkernel import Component, Level

logger = logging.getLogger(__name__)


class GateKind(Enum):
    BUF = 'BUF'
    INV = 'INV'
    AND = 'AND'
    OR = 'OR'
    NAND = 'NAND'
    NOR = 'NOR'

    @property
    def unary(self):
        return self in (GateKind.BUF, GateKind.INV)


class ClockEdge(Enum):
    RISING = 'rising'
    FALLING = 'falling'


def eval_gate(kind, levels):
    """Boolean value of a gate for the given input levels."""
    kind = GateKind(kind)
    levels = [Level.of(level) for level in levels]
    if kind.unary and len(levels) != 1:
        raise ArityMismatch(f"{kind.value} takes exactly one input, got {len(levels)}")
    if not kind.unary and len(levels) < 2:
        raise ArityMismatch(f"{kind.value} takes at least two inputs, got {len(levels)}")

    if kind is GateKind.BUF:
        return levels[0]
    if kind is GateKind.INV:
        return levels[0].inverted
    if kind is GateKind.AND:
        return Level.of(all(levels))
    if kind is GateKind.OR:
        return Level.of(any(levels))
    if kind is GateKind.NAND:
        return Level.of(not all(levels))
    return Level.of(not any(levels))


def latch_update(s, r, q_prev):
    """Next state of a reset-dominant SR latch."""
    if r:
        return Level.LOW
    if s:
        return Level.HIGH
    return Level.of(q_prev)


def sample_hold_step(master, d, edge):
    """
    Apply one clock edge to a master-slave sample/hold pair.

    Returns ``(master, output)``. On the rising edge the master starts
    tracking the input and the output is left alone (``None``); on the
    falling edge the master freezes and the output takes its value.
    """
    edge = ClockEdge(edge)
    if edge is ClockEdge.RISING:
        return Level.of(d), None
    return Level.of(master), Level.of(master)


class Gate(Component):
    def __init__(self, sim, name, kind, inputs, output, delay=None):
        super().__init__(sim, name)
        self.kind = GateKind(kind)
        self.inputs = list(inputs)
        self.output = output
        self.delay = gate_delay() if delay is None else delay
        # fail fast on bad wiring
        self._driven = eval_gate(self.kind, [sim.level(net) for net in self.inputs])
        if self._driven is not sim.level(output):
            self.drive(output, self._driven, self.delay)
        for net in self.inputs:
            sim.watch(net, self._on_input)

    def _on_input(self, _net):
        value = eval_gate(self.kind, [self.sim.level(net) for net in self.inputs])
        if value is not self._driven:
            self._driven = value
            self.drive(self.output, value, self.delay)


class SRLatch(Component):
    """Reset-dominant set/reset latch with optional inverted output."""

    def __init__(self, sim, name, set_in, reset_in, q, qn=None, delay=None, initial=Level.LOW):
        super().__init__(sim, name)
        self.set_in = set_in
        self.reset_in = reset_in
        self.q = q
        self.qn = qn
        self.delay = gate_delay() if delay is None else delay
        self.state = Level.of(initial)
        self._drive()
        sim.watch(set_in, self._on_input)
        sim.watch(reset_in, self._on_input)

    def _drive(self):
        if self.sim.level(self.q) is not self.state:
            self.drive(self.q, self.state, self.delay)
        if self.qn is not None and self.sim.level(self.qn) is self.state:
            self.drive(self.qn, self.state.inverted, self.delay)

    def _on_input(self, _net):
        state = latch_update(self.sim.level(self.set_in), self.sim.level(self.reset_in), self.state)
        if state is self.state:
            return
        logger.debug("%s: %s -> %s at %d ps", self.name, self.state.name, state.name, self.sim.now)
        self.state = state
        self.drive(self.q, state, self.delay)
        if self.qn is not None:
            self.drive(self.qn, state.inverted, self.delay)


class SampleHold(Component):
    """
    Two transmission gates in series, driven in antiphase by a clock.

    The master node follows the input while the clock is HIGH; the output
    copies the master on each falling edge and holds it for a full period.
    """

    def __init__(self, sim, name, d, clock, q, delay=None):
        super().__init__(sim, name)
        self.d = d
        self.clock = clock
        self.q = q
        self.delay = gate_delay() if delay is None else delay
        self.master = sim.level(d) if sim.is_high(clock) else Level.LOW
        sim.watch(d, self._on_input)
        sim.watch(clock, self._on_clock)

    def _on_input(self, net):
        if self.sim.is_high(self.clock):
            self.master = net.level

    def _on_clock(self, net):
        edge = ClockEdge.RISING if net.level is Level.HIGH else ClockEdge.FALLING
        self.master, output = sample_hold_step(self.master, self.sim.level(self.d), edge)
        if output is not None:
            self.drive(self.q, output, self.delay)


class ClockGen(Component):
    """
    Free-running clock with rising edges at ``phase + k * period``.

    Edges are scheduled one period ahead at a time; ``until`` bounds the last
    rising edge so a run can go quiet.
    """

    def __init__(self, sim, name, output, period, duty=50, phase=0, until=None):
        super().__init__(sim, name)
        if period <= 0:
            raise ValueError(f"Clock period must be positive, got {period}")
        if not 0 < duty < 100:
            raise ValueError(f"Clock duty must be between 0 and 100 percent, got {duty}")
        self.output = output
        self.period = period
        self.high_time = period * duty // 100
        self.phase = phase
        self.until = until
        self.running = True
        sim.call_at(max(phase, sim.now), self._rise)

    def stop(self):
        self.running = False

    def falling_edges(self, start, end):
        """Falling-edge times in [start, end]."""
        first = self.phase + self.high_time
        if end < first:
            return []
        k = max(0, -(-(start - first) // self.period))
        edges = []
        t = first + k * self.period
        while t <= end:
            edges.append(t)
            t += self.period
        return edges

    def _rise(self):
        if not self.running or (self.until is not None and self.sim.now > self.until):
            return
        self.sim.set_at(self.sim.now, self.output, Level.HIGH)
        self.sim.set_at(self.sim.now + self.high_time, self.output, Level.LOW)
        self.sim.call_at(self.sim.now + self.period, self._rise)


class FixedDelay(Component):
    """Transport delay of a fixed amount from one net to another."""

    def __init__(self, sim, name, input, output, delay):
        super().__init__(sim, name)
        if delay < 0:
            raise ValueError(f"Delay must be non-negative, got {delay}")
        self.input = input
        self.output = output
        self.delay = delay
        sim.watch(input, self._on_input)

    def _on_input(self, net):
        self.drive(self.output, net.level, self.delay)
