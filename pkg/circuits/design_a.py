"""
Design A: tap-selecting sequence learner.

Input A (Vin1) is the reference and always leaves the tapped line at the
reference tap. Input B (Vin2) leaves at whichever tap the one-hot SR-latch
bank selects. While in training mode the first coincidence-detector node to
fire selects the tap that cancels the measured offset; a coincidence in the
middle sets the mode latch instead, and from then on a middle coincidence
raises Vout a fixed latency after the later input.
"""
import logging
from dataclasses import dataclass, field

from .coincidence import CoincidenceDetector, FirstCoincidenceArbiter, Variant, node_label
from .conf import gate_delay, settle_window
from .delayline import BiasCalibration, DelayLineComponent, TunableDelayLine
from .exceptions import InvariantViolation, NotOneHot, TimingViolation
from .gates import FixedDelay, Gate, GateKind, SRLatch
from .outcomes import UNSPECIFIED_REGIME, Outcome, OutcomeKind
from .simkernel import NS, Component, Level, Pulse, Simulation

logger = logging.getLogger(__name__)

TIE_LOW = 'tie_low'


def default_detector_a():
    return CoincidenceDetector(stages_per_side=7, stage_delay=5 * NS, variant=Variant.PLAIN, min_overlap=1 * NS)


@dataclass(frozen=True)
class DesignAConfig:
    bias_mV: int = 1180
    ref_tap_delay: int = 25 * NS
    tap_pitch: int = 2500
    tap_count: int = 20
    initial_tap_delay: int = None
    cd: CoincidenceDetector = field(default_factory=default_detector_a)
    latency: int = 65 * NS
    output_width: int = 10 * NS
    mode_latch_delay: int = 15 * NS
    strobe_width: int = 1 * NS
    reset_width: int = 2 * NS
    match_delay: int = 15 * NS
    match_window: int = 30 * NS
    pattern_delay_min: int = 15 * NS
    width_range: tuple = (10 * NS, 12 * NS)
    offset_ranges: tuple = ((10 * NS, 11 * NS), (20 * NS, 21 * NS))
    width_shrink_per_unit: int = 250
    calibration: BiasCalibration = field(default_factory=BiasCalibration)

    def __post_init__(self):
        if self.initial_tap_delay is None:
            object.__setattr__(self, 'initial_tap_delay', self.ref_tap_delay)
        unit = self.calibration.unit_delay(self.bias_mV)
        if self.tap_pitch % unit:
            raise ValueError(f"Tap pitch {self.tap_pitch} ps is not a whole number of {unit} ps units")
        for delay in (self.ref_tap_delay, self.initial_tap_delay):
            if delay % self.tap_pitch or not 1 <= delay // self.tap_pitch <= self.tap_count:
                raise ValueError(f"Delay {delay} ps is not a tap of the line")
        if self.latency <= 3 * gate_delay():
            raise ValueError("Latency must exceed the gate delays of the output path")

    @property
    def units_per_tap(self):
        return self.tap_pitch // self.calibration.unit_delay(self.bias_mV)

    @property
    def ref_tap(self):
        return self.ref_tap_delay // self.tap_pitch

    @property
    def initial_tap(self):
        return self.initial_tap_delay // self.tap_pitch

    @property
    def output_pad_delay(self):
        return self.latency - 3 * gate_delay()

    def line(self):
        return TunableDelayLine(
            bias_mV=self.bias_mV,
            n_units=self.tap_count * self.units_per_tap,
            units_per_tap=self.units_per_tap,
            width_shrink_per_unit=self.width_shrink_per_unit,
            calibration=self.calibration,
        )

    def target_tap(self, k):
        """Tap selected by node k, or None if it falls off the line."""
        if k == 0:
            return None
        index = self.initial_tap - (k * self.cd.stage_delay) // self.tap_pitch
        return index if 1 <= index <= self.tap_count else None

    def covers_envelope(self):
        widest = max(high for _, high in self.offset_ranges)
        return (
            self.ref_tap_delay - widest >= self.tap_pitch
            and self.ref_tap_delay + widest <= self.tap_count * self.tap_pitch
        )

    def timing_violations(self, a_rise, b_rise, width, previous_end=None):
        violations = []
        low, high = self.width_range
        if not low <= width <= high:
            violations.append(f"pulse width {width} ps outside [{low}, {high}] ps")
        offset = abs(b_rise - a_rise)
        if not any(lo <= offset <= hi for lo, hi in self.offset_ranges):
            violations.append(f"pulse delay {offset} ps outside the legal ranges")
        if previous_end is not None and min(a_rise, b_rise) - previous_end < self.pattern_delay_min:
            violations.append(
                f"pattern delay {min(a_rise, b_rise) - previous_end} ps below {self.pattern_delay_min} ps"
            )
        return violations


class PairStrobe(Component):
    """Emits a short pulse once both inputs have risen."""

    def __init__(self, sim, name, a, b, output, width, delay=None):
        super().__init__(sim, name)
        self.output = output
        self.width = width
        self.delay = gate_delay() if delay is None else delay
        self.seen = {a: False, b: False}
        sim.watch(a, self._on_input)
        sim.watch(b, self._on_input)

    def _on_input(self, net):
        if net.level is not Level.HIGH:
            return
        self.seen[net.id] = True
        if all(self.seen.values()):
            self.seen = dict.fromkeys(self.seen, False)
            self.sim.set_after(self.delay, self.output, Level.HIGH)
            self.sim.set_after(self.delay + self.width, self.output, Level.LOW)


class OneShot(Component):
    """
    Answers each rising input edge with a pulse of fixed width after a fixed
    delay. A rise arriving while a pulse is pending extends that pulse.
    """

    def __init__(self, sim, name, input, output, width, delay):
        super().__init__(sim, name)
        self.output = output
        self.width = width
        self.delay = delay
        self._fall = None
        sim.watch(input, self._on_input)

    def _on_input(self, net):
        if net.level is not Level.HIGH:
            return
        sim = self.sim
        rise = sim.now + self.delay
        if self._fall is not None and not self._fall.cancelled and self._fall.time >= rise:
            sim.cancel(self._fall)
        else:
            sim.set_at(rise, self.output, Level.HIGH)
        self._fall = sim.set_at(rise + self.width, self.output, Level.LOW)


class DesignA:
    def __init__(self, config=None, sim=None):
        self.config = config or DesignAConfig()
        self.sim = sim or Simulation(name='design_a')
        self.vout_rises = []
        self._last_end = None
        if not self.config.covers_envelope():
            logger.warning("Tap range does not cover every legal input offset")
        self._build()

    def _or(self, name, inputs):
        if not inputs:
            return TIE_LOW
        Gate(self.sim, name, GateKind.OR if len(inputs) > 1 else GateKind.BUF, inputs, name)
        return name

    def _build(self):
        sim, config = self.sim, self.config
        line = config.line()
        upt = config.units_per_tap

        DelayLineComponent(sim, 'ref_line', line, 'Vin1', {'ref_tap': config.ref_tap * upt})
        Gate(sim, 'ref_buf', GateKind.BUF, ['ref_tap'], 'ref_buf')
        Gate(sim, 'ref_d', GateKind.BUF, ['ref_buf'], 'ref_d')

        self.taps = range(1, config.tap_count + 1)
        outputs = {}
        for i in self.taps:
            outputs[sim.net(f'tap_{i}', trace=False).id] = i * upt
        DelayLineComponent(sim, 'trained_line', line, 'Vin2', outputs)
        for i in self.taps:
            Gate(sim, f'tap_sel_{i}', GateKind.AND, [f'tap_{i}', f'sel_{i}'], f'tap_sel_{i}')
        Gate(sim, 'trained_d', GateKind.OR, [f'tap_sel_{i}' for i in self.taps], 'trained_d')

        self.cd = config.cd.build(sim, 'ref_d', 'trained_d', prefix='cd')
        self.arbiter = FirstCoincidenceArbiter(sim, 'win', self.cd)

        # update gates are only live in training mode
        updates = {}
        for k in config.cd.nodes:
            target = config.target_tap(k)
            if target is None:
                continue
            upd = f'upd_{node_label(k)}'
            Gate(sim, upd, GateKind.NOR, [self.arbiter.win_net(k), 'Vactive'], upd)
            updates[upd] = target

        Gate(sim, 'mode_set', GateKind.INV, [self.arbiter.win_net(0)], 'mode_set')
        SRLatch(sim, 'mode', 'mode_set', 'Vreset', 'Vactive', qn='Vtraining', delay=config.mode_latch_delay)

        initial = config.initial_tap
        for i in self.taps:
            sets = [upd for upd, target in updates.items() if target == i]
            resets = [upd for upd, target in updates.items() if target != i]
            (sets if i == initial else resets).append('Vreset')
            SRLatch(
                sim, f'sel_{i}',
                self._or(f'set_{i}', sets), self._or(f'reset_{i}', resets), f'sel_{i}',
                initial=Level.HIGH if i == initial else Level.LOW,
            )

        PairStrobe(sim, 'strobe', 'Vin1', 'Vin2', 'strobe', config.strobe_width)
        FixedDelay(sim, 'strobe_pad', 'strobe', 'strobe_d', config.output_pad_delay)
        # each recognized pair opens its own window around its delayed strobe
        Gate(sim, 'match_set', GateKind.AND, ['mode_set', 'Vactive'], 'match_set')
        OneShot(sim, 'match', 'match_set', 'match', config.match_window, config.match_delay)
        Gate(sim, 'vout_set', GateKind.AND, ['strobe_d', 'match', 'Vactive'], 'vout_set')
        FixedDelay(sim, 'vout_width', 'Vout', 'vout_reset', config.output_width)
        SRLatch(sim, 'vout', 'vout_set', 'vout_reset', 'Vout')
        sim.watch('Vout', self._on_vout)

    def _on_vout(self, net):
        if net.level is Level.HIGH:
            self.vout_rises.append(self.sim.now)

    # -- observation ------------------------------------------------------

    @property
    def active(self):
        return self.sim.is_high('Vactive')

    def tap_levels(self):
        return [self.sim.level(f'sel_{i}') for i in self.taps]

    def selected_tap(self):
        """Delay of the selected tap, in ps."""
        selected = [i for i in self.taps if self.sim.is_high(f'sel_{i}')]
        if len(selected) != 1:
            raise NotOneHot(f"Tap latches {selected} are not one-hot at {self.sim.now} ps")
        return selected[0] * self.config.tap_pitch

    def check_invariants(self):
        self.selected_tap()
        if self.sim.level('Vtraining') is self.sim.level('Vactive'):
            raise InvariantViolation(f"Vtraining equals Vactive at {self.sim.now} ps")

    # -- operations -------------------------------------------------------

    def next_start(self):
        if self._last_end is None:
            return self.sim.now
        return max(self.sim.now, self._last_end + self.config.pattern_delay_min)

    def present(self, a_rise, b_rise, width, until=None):
        """
        Present one A/B pair at absolute times and let the device settle.

        Pairs outside the timing envelope still run; their outcome carries
        the UNSPECIFIED_REGIME flag. ``until`` overrides the settle horizon.
        """
        sim = self.sim
        flags = set()
        violations = self.config.timing_violations(a_rise, b_rise, width, self._last_end)
        if violations:
            flags.add(UNSPECIFIED_REGIME)
            logger.warning("Presentation at %d ps outside the timing envelope: %s", a_rise, '; '.join(violations))

        was_active = self.active
        winners_before = len(self.arbiter.winners)
        vout_before = len(self.vout_rises)

        sim.drive_pulse('Vin1', Pulse(a_rise, width))
        sim.drive_pulse('Vin2', Pulse(b_rise, width))
        self._last_end = max(a_rise, b_rise) + width
        sim.run_until(self._last_end + settle_window() if until is None else until)

        winners = self.arbiter.winners[winners_before:]
        node = winners[0][1] if winners else None
        rises = self.vout_rises[vout_before:]
        tap = self.selected_tap()
        if rises:
            outcome = Outcome(OutcomeKind.RECOGNIZED, t_out=rises[0], tap_delay=tap, node=node)
        elif not was_active and self.active:
            outcome = Outcome(OutcomeKind.ENTERED_ACTIVE, tap_delay=tap, node=node)
        elif not was_active and node is not None and self.config.target_tap(node) is not None:
            outcome = Outcome(OutcomeKind.TRAINED, tap_delay=tap, node=node)
        else:
            outcome = Outcome(OutcomeKind.NO_MATCH, tap_delay=tap, node=node)
        if flags:
            outcome = Outcome(
                outcome.kind, outcome.t_out, outcome.tap_delay, node=outcome.node,
                flags=frozenset(flags), violations=tuple(violations),
            )
        logger.info(
            "Design A: A=%d ps B=%d ps width=%d ps -> %s (tap %d ps)",
            a_rise, b_rise, width, outcome.name, tap,
        )
        return outcome

    def present_offset(self, offset, width=10 * NS, until=None):
        """Present B ``offset`` ps after A (negative: B first) at the next legal start."""
        start = self.next_start()
        return self.present(start + max(0, -offset), start + max(0, offset), width, until)

    def validate_timing(self, a_rise, b_rise, width):
        violations = self.config.timing_violations(a_rise, b_rise, width, self._last_end)
        if violations:
            raise TimingViolation('; '.join(violations), violations)

    def reset(self, at=None, until=None):
        """Pulse Vreset: back to training mode with the initial tap selected."""
        sim = self.sim
        start = sim.now if at is None else at
        sim.drive_pulse('Vreset', Pulse(start, self.config.reset_width))
        settled = start + self.config.reset_width + self.config.mode_latch_delay + 10 * gate_delay()
        sim.run_until(settled if until is None else until)
        logger.info("Design A reset at %d ps", start)
        return settled
