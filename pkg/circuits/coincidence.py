"""
Jeffress-style coincidence detector.

Two signals run through opposed delay chains; the reference enters at node
-S, the other signal at node +S, and every chain hop costs half a stage. At
node k the two copies are shifted by ``offset - k * stage_delay``, so the
node where they meet reads the input offset in units of ``stage_delay``.

Each node is an active-low pair detector (NAND of the two chain copies with
a minimum-overlap filter). The CLOCKED variant additionally holds every node
output for one clock period and passes it through a sample/hold pair.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum

from .conf import gate_delay, settle_window
from .exceptions import OutOfSpan, SimulationError
from .gates import ClockGen, FixedDelay, Gate, GateKind, SampleHold
from .simkernel import NS, Component, Level, Simulation

logger = logging.getLogger(__name__)


class Variant(Enum):
    PLAIN = 'PLAIN'
    CLOCKED = 'CLOCKED'


def node_label(k):
    """Net-safe label for node k: m2, 0, p2."""
    if k < 0:
        return f"m{-k}"
    if k > 0:
        return f"p{k}"
    return "0"


@dataclass(frozen=True)
class Detection:
    node: int
    time: int
    seq: int = 0


@dataclass(frozen=True)
class CoincidenceDetector:
    stages_per_side: int = 7
    stage_delay: int = 5 * NS
    variant: Variant = Variant.PLAIN
    clock_period: int = 10 * NS
    min_overlap: int = 1 * NS
    span_width: int = 10 * NS

    def __post_init__(self):
        object.__setattr__(self, 'variant', Variant(self.variant))
        if self.stages_per_side <= 0:
            raise ValueError("A detector needs at least one stage per side")
        if self.stage_delay <= 0 or self.stage_delay % 2:
            raise ValueError("Stage delay must be a positive, even number of ps")
        if self.min_overlap < 0:
            raise ValueError("Minimum overlap must be non-negative")

    @property
    def hop(self):
        return self.stage_delay // 2

    @property
    def nodes(self):
        return range(-self.stages_per_side, self.stages_per_side + 1)

    @property
    def hold(self):
        return self.clock_period if self.variant is Variant.CLOCKED else 0

    @property
    def span(self):
        return self.stages_per_side * self.stage_delay + self.span_width

    def offset_oracle(self, offset):
        """Node predicted to detect a signed input offset (ps)."""
        if abs(offset) > self.span:
            raise OutOfSpan(f"Offset {offset} ps is beyond the detector span of ±{self.span} ps")
        magnitude = (2 * abs(offset) + self.stage_delay) // (2 * self.stage_delay)
        node = magnitude if offset >= 0 else -magnitude
        return max(-self.stages_per_side, min(self.stages_per_side, node))

    def build(self, sim, reference, signal, prefix='cd', clock=None):
        return CoincidenceArray(sim, prefix, self, reference, signal, clock)

    def feed(self, a, b, supply_mV=None):
        """
        Run two already-shifted pulses through a standalone detector.

        Returns every node assertion in (time, seq) order; an empty list means
        the pulses never met inside the span.
        """
        sim = Simulation(supply_mV=supply_mV, name='feed')
        horizon = max(a.fall, b.fall) + 2 * self.stages_per_side * self.stage_delay + settle_window()
        clock = None
        if self.variant is Variant.CLOCKED:
            clock = ClockGen(sim, 'clock', 'Vclock', self.clock_period, until=horizon).output
        array = self.build(sim, 'Vin1', 'Vin2', clock=clock)
        sim.drive_pulse('Vin1', a)
        sim.drive_pulse('Vin2', b)
        sim.run_until(horizon)
        return sorted(array.detections, key=lambda d: (d.time, d.seq))

    def detected_node(self, detections):
        """
        Node read from a feed result, or None without detections.

        A sampled detector reports every node that fired within the same clock
        period at one edge; the middle of that run, rounded toward node 0, is
        the reading.
        """
        if not detections:
            return None
        first = min(d.time for d in detections)
        if self.variant is Variant.PLAIN:
            return min((d for d in detections if d.time == first), key=lambda d: d.seq).node
        nodes = sorted(d.node for d in detections if d.time == first)
        return int((nodes[0] + nodes[-1]) / 2)


def offset_oracle(cd, offset):
    return cd.offset_oracle(offset)


def feed(cd, a, b):
    return cd.feed(a, b)


class PairDetector(Component):
    """
    Active-high pair detector of one node.

    Asserts ``min_overlap`` after both inputs are HIGH together, using closed
    intervals so an edge and a fall at the same instant still count. The
    assertion is released ``hold`` after the overlap ends.
    """

    def __init__(self, sim, name, a, b, output, min_overlap, hold=0, delay=None):
        super().__init__(sim, name)
        self.inputs = (a, b)
        self.output = output
        self.min_overlap = min_overlap
        self.hold = hold
        self.delay = gate_delay() if delay is None else delay
        self.rises = {a: None, b: None}
        self.falls = {a: None, b: None}
        self.asserted = False
        self._release = None
        for net in self.inputs:
            sim.watch(net, self._on_input)

    def _covers(self, net, start, end):
        rise, fall = self.rises[net], self.falls[net]
        return rise is not None and rise <= start and (fall is None or fall >= end)

    def _on_input(self, net):
        now = self.sim.now
        if net.level is Level.HIGH:
            self.rises[net.id] = now
            self.falls[net.id] = None
            if all(self._covers(n, now, now) for n in self.inputs):
                start = now
                self.sim.call_at(start + self.min_overlap, lambda: self._check(start))
            return
        self.falls[net.id] = now
        if self.asserted:
            self._schedule_release()

    def _check(self, start):
        end = start + self.min_overlap
        if not all(self._covers(n, start, end) for n in self.inputs):
            return
        if self._release is not None:
            self.sim.cancel(self._release)
            self._release = None
        if not self.asserted:
            self.asserted = True
            self.sim.set_after(self.delay, self.output, Level.HIGH)
        # with a zero filter interval the overlap may already be over
        if any(self.falls[n] is not None for n in self.inputs):
            self._schedule_release()

    def _schedule_release(self):
        if self._release is None:
            self._release = self.sim.call_at(self.sim.now + self.hold, self._deassert)

    def _deassert(self):
        self._release = None
        self.asserted = False
        self.sim.set_after(self.delay, self.output, Level.LOW)


class CoincidenceArray(Component):
    """
    A detector wired into a simulation.

    Nets: ``{prefix}_{label}`` is the active-low output of each node,
    ``{prefix}_hit_{label}`` its active-high pair (or sampled) signal.
    """

    def __init__(self, sim, prefix, config, reference, signal, clock=None):
        super().__init__(sim, prefix)
        self.config = config
        self.prefix = prefix
        self.detections = []
        self._seq = itertools.count()
        if config.variant is Variant.CLOCKED and clock is None:
            raise SimulationError("A clocked coincidence detector needs a clock net")
        for k in config.nodes:
            label = node_label(k)
            a_k = sim.net(f"{prefix}_a_{label}", trace=False).id
            b_k = sim.net(f"{prefix}_b_{label}", trace=False).id
            FixedDelay(sim, f"{prefix}_chain_a_{label}", reference, a_k, (k + config.stages_per_side) * config.hop)
            FixedDelay(sim, f"{prefix}_chain_b_{label}", signal, b_k, (config.stages_per_side - k) * config.hop)
            pair = f"{prefix}_pair_{label}"
            PairDetector(sim, pair, a_k, b_k, pair, config.min_overlap, hold=config.hold)
            hit = pair
            if config.variant is Variant.CLOCKED:
                hit = f"{prefix}_hit_{label}"
                SampleHold(sim, f"{prefix}_sh_{label}", pair, clock, hit)
            out = self.node_net(k)
            Gate(sim, out, GateKind.INV, [hit], out)
            self._watch_node(k, out)

    def node_net(self, k):
        return f"{self.prefix}_{node_label(k)}"

    def hit_net(self, k):
        """Active-high detection signal of node k after any sampling."""
        if self.config.variant is Variant.CLOCKED:
            return f"{self.prefix}_hit_{node_label(k)}"
        return f"{self.prefix}_pair_{node_label(k)}"

    def _watch_node(self, k, out):
        def on_change(net):
            # outputs power up HIGH; only falls after that are detections
            if net.level is Level.LOW and self.sim.started:
                detection = Detection(k, self.sim.now, next(self._seq))
                self.detections.append(detection)
                logger.debug("%s: node %d asserted at %d ps", self.prefix, k, self.sim.now)
        self.sim.watch(out, on_change)


class FirstCoincidenceArbiter(Component):
    """
    Forwards only the first node to assert in a wave.

    ``win_{label}`` nets are active-low like the node outputs. The arbiter
    re-arms once every node output is deasserted again.
    """

    def __init__(self, sim, name, array, delay=None):
        super().__init__(sim, name)
        self.array = array
        self.delay = gate_delay() if delay is None else delay
        self.winner = None
        self.asserted = set()
        self.winners = []
        for k in array.config.nodes:
            win = self.win_net(k)
            self.drive(win, Level.HIGH, self.delay)
            sim.watch(array.hit_net(k), self._make_listener(k))

    def win_net(self, k):
        return f"{self.name}_{node_label(k)}"

    def _make_listener(self, k):
        def on_change(net):
            if net.level is Level.HIGH:
                self.asserted.add(k)
                if self.winner is None:
                    self.winner = k
                    self.winners.append((self.sim.now, k))
                    self.drive(self.win_net(k), Level.LOW, self.delay)
                    logger.debug("%s: node %d wins at %d ps", self.name, k, self.sim.now)
                return
            self.asserted.discard(k)
            if k == self.winner:
                self.drive(self.win_net(k), Level.HIGH, self.delay)
            if not self.asserted and self.winner is not None:
                self.winner = None
        return on_change
