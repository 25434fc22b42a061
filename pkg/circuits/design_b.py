"""
Design B: bias-switching sequence learner.

Input A passes the 8-unit tunable line, biased at 700 mV (60 ns) until
trained. A clocked coincidence detector compares it with input B; a hit on
the near decision node switches the bias to the supply (20 ns), a hit on the
far decision node switches it to 950 mV (40 ns) and suppresses the near
branch. The decision latches never clear. After training, a coincidence in
the middle of the detector is a recognition and drives Vout.
"""
import logging
from dataclasses import dataclass, field

from .coincidence import CoincidenceDetector, Variant
from .conf import gate_delay, settle_window, supply_mv
from .delayline import BiasCalibration, DelayLineComponent, TunableDelayLine
from .exceptions import AlreadyTrained, InvariantViolation, TimingViolation, Untrained
from .gates import ClockGen, FixedDelay, Gate, GateKind, SRLatch
from .outcomes import UNSPECIFIED_REGIME, BiasDecision, Outcome, OutcomeKind
from .simkernel import NS, Component, Level, Pulse, Simulation

logger = logging.getLogger(__name__)

TIE_LOW = 'tie_low'


def default_detector_b():
    """
    Clocked detector with six 10 ns stages per side.

    The minimum-overlap filter is off (``min_overlap=0``): pulses that only
    touch at one instant still count as a coincidence, and the 12, 30 and
    32 ns edges of the training sweep depend on it.
    """
    return CoincidenceDetector(
        stages_per_side=6, stage_delay=10 * NS, variant=Variant.CLOCKED,
        clock_period=10 * NS, min_overlap=0,
    )


@dataclass(frozen=True)
class DesignBConfig:
    cd: CoincidenceDetector = field(default_factory=default_detector_b)
    near_nodes: tuple = (-4,)
    far_nodes: tuple = (-2,)
    default_bias_mV: int = 700
    bias_40ns_mV: int = 950
    bias_20ns_mV: int = None
    n_units: int = 8
    width_shrink_per_unit: int = 250
    a_path_delay: int = 2 * NS
    b_path_delay: int = 0
    pattern_delay_min: int = 15 * NS
    width_range: tuple = (10 * NS, 15 * NS)
    offset_range: tuple = (10 * NS, 50 * NS)
    mirrored: bool = False
    calibration: BiasCalibration = field(default_factory=BiasCalibration)

    def __post_init__(self):
        if self.bias_20ns_mV is None:
            object.__setattr__(self, 'bias_20ns_mV', supply_mv())
        near, far = set(self.near_nodes), set(self.far_nodes)
        if near & far:
            raise ValueError("Near and far decision nodes must be disjoint")
        if 0 in near | far:
            raise ValueError("Node 0 is the recognition node and cannot drive a decision")
        nodes = set(self.cd.nodes)
        if not (near | far) <= nodes:
            raise ValueError("Decision nodes must lie inside the detector")

    def line(self, bias_mV=None):
        return TunableDelayLine(
            bias_mV=self.default_bias_mV if bias_mV is None else bias_mV,
            n_units=self.n_units,
            width_shrink_per_unit=self.width_shrink_per_unit,
            calibration=self.calibration,
        )

    def timing_violations(self, offset, width, previous_end=None, start=None):
        violations = []
        low, high = self.width_range
        if not low <= width <= high:
            violations.append(f"pulse width {width} ps outside [{low}, {high}] ps")
        low, high = self.offset_range
        if not low <= offset <= high:
            violations.append(f"pulse delay {offset} ps outside [{low}, {high}] ps")
        if previous_end is not None and start is not None and start - previous_end < self.pattern_delay_min:
            violations.append(f"pattern delay {start - previous_end} ps below {self.pattern_delay_min} ps")
        return violations


class BiasMux(Component):
    """Drives the shared line bias from the two decision latches."""

    def __init__(self, sim, name, config, line, latch_20, latch_40):
        super().__init__(sim, name)
        self.config = config
        self.line = line
        self.latch_20 = latch_20
        self.latch_40 = latch_40
        self.bias_mV = config.default_bias_mV
        sim.record_value('bias_mV', self.bias_mV)
        sim.watch(latch_20, self._on_latch)
        sim.watch(latch_40, self._on_latch)

    def selected(self):
        if self.sim.is_high(self.latch_20):
            return self.config.bias_20ns_mV
        if self.sim.is_high(self.latch_40):
            return self.config.bias_40ns_mV
        return self.config.default_bias_mV

    def _on_latch(self, _net):
        bias = self.selected()
        if bias == self.bias_mV:
            return
        logger.debug("%s: bias %d -> %d mV at %d ps", self.name, self.bias_mV, bias, self.sim.now)
        self.bias_mV = bias
        self.line.retune(bias)
        self.sim.record_value('bias_mV', bias)


class BiasController:
    """Set-once decision latches with the 20 ns suppression branch."""

    def __init__(self, sim, near_hit, far_hit, settle_delay=None):
        delay = gate_delay()
        settle = 3 * delay if settle_delay is None else settle_delay
        # the near branch waits for the suppression path to settle
        FixedDelay(sim, 'near_settled', near_hit, 'near_settled', settle)
        Gate(sim, 'suppress_20ns', GateKind.OR, [far_hit, 'latch_40ns'], 'suppress_20ns')
        Gate(sim, 'suppress_n', GateKind.INV, ['suppress_20ns'], 'suppress_n')
        Gate(sim, 'set_20ns', GateKind.AND, ['near_settled', 'suppress_n'], 'set_20ns')
        Gate(sim, 'latch_20ns_n', GateKind.INV, ['latch_20ns'], 'latch_20ns_n')
        Gate(sim, 'set_40ns', GateKind.AND, [far_hit, 'latch_20ns_n'], 'set_40ns')
        SRLatch(sim, 'latch_20ns', 'set_20ns', TIE_LOW, 'latch_20ns')
        SRLatch(sim, 'latch_40ns', 'set_40ns', TIE_LOW, 'latch_40ns')
        self.sim = sim

    @property
    def default_connected(self):
        return not (self.latch_20ns or self.latch_40ns)

    @property
    def latch_20ns(self):
        return self.sim.is_high('latch_20ns')

    @property
    def latch_40ns(self):
        return self.sim.is_high('latch_40ns')

    @property
    def suppress_20ns(self):
        return self.sim.is_high('suppress_20ns')


class DesignB:
    def __init__(self, config=None, sim=None):
        self.config = config or DesignBConfig()
        self.sim = sim or Simulation(name='design_b')
        self.decision = None
        self.last_violations = []
        self.vout_rises = []
        self._last_end = None
        self._build()

    def _or(self, name, inputs):
        Gate(self.sim, name, GateKind.OR if len(inputs) > 1 else GateKind.BUF, inputs, name)
        return name

    def _build(self):
        sim, config = self.sim, self.config
        tuned, fixed = ('Vin2', 'Vin1') if config.mirrored else ('Vin1', 'Vin2')
        ClockGen(sim, 'clock', 'Vclock', config.cd.clock_period)
        self.line = DelayLineComponent(sim, 'a_line', config.line(), tuned, {'a_line_out': config.n_units})
        FixedDelay(sim, 'a_path', 'a_line_out', 'a_d', config.a_path_delay)
        FixedDelay(sim, 'b_path', fixed, 'b_d', config.b_path_delay)
        self.cd = config.cd.build(sim, 'a_d', 'b_d', prefix='cd', clock='Vclock')

        near = self._or('near_hit', [self.cd.hit_net(k) for k in config.near_nodes])
        far = self._or('far_hit', [self.cd.hit_net(k) for k in config.far_nodes])
        self.controller = BiasController(sim, near, far)
        self.mux = BiasMux(sim, 'bias_mux', config, self.line, 'latch_20ns', 'latch_40ns')

        Gate(sim, 'Vout', GateKind.INV, [self.cd.node_net(0)], 'Vout')
        sim.watch('Vout', self._on_vout)

    def _on_vout(self, net):
        if net.level is Level.HIGH and self.sim.started:
            self.vout_rises.append(self.sim.now)

    # -- observation ------------------------------------------------------

    def current_bias(self):
        return self.mux.bias_mV

    def trained_delay(self):
        return self.config.calibration.line_delay_for_bias(self.current_bias())

    @property
    def trained(self):
        return self.decision in (BiasDecision.SET_20NS, BiasDecision.SET_40NS, BiasDecision.KEEP_DEFAULT)

    def check_invariants(self):
        if self.controller.latch_20ns and self.controller.latch_40ns:
            raise InvariantViolation(f"Both bias latches are set at {self.sim.now} ps")
        if self.current_bias() != self.mux.selected():
            raise InvariantViolation(f"Bias {self.current_bias()} mV does not follow the latches")

    def bias_changes(self):
        return self.sim.analog.get('bias_mV', [])[1:]

    # -- operations -------------------------------------------------------

    def next_start(self):
        if self._last_end is None:
            return self.sim.now
        return max(self.sim.now, self._last_end + self.config.pattern_delay_min)

    def _offset(self, a_rise, b_rise):
        return a_rise - b_rise if self.config.mirrored else b_rise - a_rise

    def _run(self, a_rise, b_rise, width, until=None):
        violations = self.config.timing_violations(
            self._offset(a_rise, b_rise), width, self._last_end, min(a_rise, b_rise),
        )
        if violations:
            logger.warning("Presentation at %d ps outside the timing envelope: %s", a_rise, '; '.join(violations))
        vout_before = len(self.vout_rises)
        self.sim.drive_pulse('Vin1', Pulse(a_rise, width))
        self.sim.drive_pulse('Vin2', Pulse(b_rise, width))
        self._last_end = max(a_rise, b_rise) + width
        self.sim.run_until(self._last_end + settle_window() if until is None else until)
        return violations, self.vout_rises[vout_before:]

    def train(self, a_rise, b_rise, width, until=None):
        """Present the training pair and return the settled bias decision."""
        if self.controller.latch_20ns or self.controller.latch_40ns:
            raise AlreadyTrained(f"Bias already switched to {self.current_bias()} mV")
        violations, rises = self._run(a_rise, b_rise, width, until)
        if self.controller.latch_20ns:
            decision = BiasDecision.SET_20NS
        elif self.controller.latch_40ns:
            decision = BiasDecision.SET_40NS
        elif rises:
            decision = BiasDecision.KEEP_DEFAULT
        else:
            decision = BiasDecision.FAILED
        self.decision = decision
        self.last_violations = violations
        logger.info(
            "Design B: trained on offset %d ps -> %s (%d mV)",
            self._offset(a_rise, b_rise), decision.value, self.current_bias(),
        )
        return decision

    def train_outcome(self, a_rise, b_rise, width, until=None):
        decision = self.train(a_rise, b_rise, width, until)
        flags = frozenset({UNSPECIFIED_REGIME}) if self.last_violations else frozenset()
        return Outcome(decision, bias_mV=self.current_bias(), flags=flags, violations=tuple(self.last_violations))

    def detect(self, a_rise, b_rise, width, until=None):
        """Present a pair to a trained device."""
        if not self.trained:
            raise Untrained("Design B must be trained before detection")
        violations, rises = self._run(a_rise, b_rise, width, until)
        flags = frozenset({UNSPECIFIED_REGIME}) if violations else frozenset()
        if rises:
            outcome = Outcome(OutcomeKind.RECOGNIZED, t_out=rises[0], bias_mV=self.current_bias(), node=0,
                              flags=flags, violations=tuple(violations))
        else:
            outcome = Outcome(OutcomeKind.NO_MATCH, bias_mV=self.current_bias(), flags=flags,
                              violations=tuple(violations))
        logger.info("Design B: detect offset %d ps -> %s", self._offset(a_rise, b_rise), outcome.name)
        return outcome

    def present(self, a_rise, b_rise, width, until=None):
        """Train while untrained, detect afterwards."""
        if self.trained:
            return self.detect(a_rise, b_rise, width, until)
        return self.train_outcome(a_rise, b_rise, width, until)

    def present_offset(self, offset, width=10 * NS, until=None):
        """Present a pair whose B-after-A offset (A-after-B when mirrored) is ``offset``."""
        start = self.next_start()
        early, late = start + max(0, -offset), start + max(0, offset)
        if self.config.mirrored:
            return self.present(late, early, width, until)
        return self.present(early, late, width, until)

    def validate_timing(self, a_rise, b_rise, width):
        violations = self.config.timing_violations(
            self._offset(a_rise, b_rise), width, self._last_end, min(a_rise, b_rise),
        )
        if violations:
            raise TimingViolation('; '.join(violations), violations)
