"""
Scenario files: a design, config overrides and the input pulses to present.

A scenario is validated with ``ScenarioSerializer`` and turned into an ordered
list of presentations (an A/B pair) and resets.
"""
import json
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Optional

from rest_framework.exceptions import ValidationError

from circuits.delayline import BiasCalibration
from circuits.design_a import DesignAConfig
from circuits.design_b import DesignBConfig
from circuits.simkernel import NS
from .exceptions import SchemaError
from .serializers import ScenarioSerializer

logger = logging.getLogger(__name__)

DEFAULT_WIDTH = 10 * NS

TIMING_KEYS = {
    'A': {'pattern_delay_min', 'latency', 'output_width', 'mode_latch_delay'},
    'B': {'pattern_delay_min', 'a_path_delay', 'b_path_delay'},
}


@dataclass(frozen=True)
class Stimulus:
    label: str
    rise: int
    width: int = DEFAULT_WIDTH


@dataclass(frozen=True)
class Presentation:
    a_rise: int
    b_rise: int
    width: int

    @property
    def start(self):
        return min(self.a_rise, self.b_rise)

    @property
    def end(self):
        return max(self.a_rise, self.b_rise) + self.width


@dataclass(frozen=True)
class ResetEvent:
    at: int
    width: int = 0

    @property
    def start(self):
        return self.at


@dataclass
class Scenario:
    design: str
    config: object
    stimuli: list = field(default_factory=list)
    seed: int = 0
    jitter: int = 0
    allow_violation: bool = False
    source: Optional[str] = None

    def events(self):
        """Presentations and resets in start order."""
        return pair_stimuli(self.stimuli)


def expand_sequence(symbols, width=DEFAULT_WIDTH, inter_pulse_delay=10 * NS, pattern_delay=15 * NS, start=0):
    """
    Expand a symbol string such as "ABABBAAB" into stimuli.

    Symbols are taken in pairs: the first pulse rises at the frame start, the
    second ``inter_pulse_delay`` later, and the next frame starts
    ``pattern_delay`` after the second pulse falls.
    """
    if len(symbols) % 2:
        raise SchemaError(f"Sequence {symbols!r} has an odd number of symbols")
    stimuli = []
    t = start
    for i in range(0, len(symbols), 2):
        first, second = symbols[i], symbols[i + 1]
        if first == second:
            raise SchemaError(f"Frame {first}{second} at {t} ps drives one input twice")
        stimuli.append(Stimulus(first, t, width))
        stimuli.append(Stimulus(second, t + inter_pulse_delay, width))
        t += inter_pulse_delay + width + pattern_delay
    return stimuli


def apply_jitter(stimuli, jitter, seed):
    """Move each rise by a uniform integer in [-jitter, +jitter] ps; return them sorted by rise."""
    if not jitter:
        return sorted(stimuli, key=lambda s: s.rise)
    rng = random.Random(seed)
    moved = [replace(s, rise=max(0, s.rise + rng.randint(-jitter, jitter))) for s in stimuli]
    return sorted(moved, key=lambda s: s.rise)


def pair_stimuli(stimuli):
    """Group time-ordered stimuli into A/B presentations and resets."""
    events = []
    pending = {}
    for stimulus in sorted(stimuli, key=lambda s: s.rise):
        if stimulus.label == 'RESET':
            if pending:
                raise SchemaError(f"Reset at {stimulus.rise} ps interrupts an incomplete pair")
            events.append(ResetEvent(stimulus.rise, stimulus.width))
            continue
        if stimulus.label in pending:
            raise SchemaError(f"Input {stimulus.label} pulses twice before its pair completes at {stimulus.rise} ps")
        pending[stimulus.label] = stimulus
        if len(pending) == 2:
            a, b = pending['A'], pending['B']
            if a.width != b.width:
                raise SchemaError(f"Pair at {min(a.rise, b.rise)} ps mixes widths {a.width} and {b.width} ps")
            events.append(Presentation(a.rise, b.rise, a.width))
            pending = {}
    if pending:
        raise SchemaError(f"Unpaired {', '.join(sorted(pending))} pulse at the end of the stimuli")
    return events


def presentation_violations(config, presentations):
    """Timing-envelope violations of each presentation, in order."""
    result = []
    previous_end = None
    for event in presentations:
        if isinstance(event, ResetEvent):
            previous_end = None
            continue
        if isinstance(config, DesignAConfig):
            violations = config.timing_violations(event.a_rise, event.b_rise, event.width, previous_end)
        else:
            offset = event.a_rise - event.b_rise if config.mirrored else event.b_rise - event.a_rise
            violations = config.timing_violations(offset, event.width, previous_end, event.start)
        result.append(violations)
        previous_end = event.end
    return result


def _config_error(exc):
    return SchemaError(f"Invalid configuration: {exc}", {'config': [str(exc)]})


def build_config(data):
    """Design config with the scenario's overrides applied to the defaults."""
    design = data['design']
    timing = dict(data.get('timing', {}))
    unknown = set(timing) - TIMING_KEYS[design]
    if unknown:
        raise SchemaError(
            f"Timing keys {sorted(unknown)} do not apply to Design {design}",
            {'timing': sorted(unknown)},
        )
    try:
        overrides = dict(timing)
        if 'calibration' in data:
            overrides['calibration'] = BiasCalibration.from_points(
                (point['bias_mV'], point['line_delay']) for point in data['calibration']
            )
        if design == 'A':
            base = DesignAConfig()
            overrides.update(data.get('taps', {}))
            if 'cd' in data:
                overrides['cd'] = replace(base.cd, **data['cd'])
            return replace(base, **overrides)
        base = DesignBConfig()
        bias = dict(data.get('bias', {}))
        for key in ('near_nodes', 'far_nodes'):
            if key in bias:
                bias[key] = tuple(bias[key])
        overrides.update(bias)
        if 'cd' in data:
            overrides['cd'] = replace(base.cd, **data['cd'])
        return replace(base, **overrides)
    except ValueError as exc:
        raise _config_error(exc) from exc


def scenario_from_dict(raw, source=None):
    serializer = ScenarioSerializer(data=raw)
    try:
        serializer.is_valid(raise_exception=True)
    except ValidationError as exc:
        message = f"Scenario {source} does not validate" if source else "Scenario does not validate"
        raise SchemaError(message, exc.detail) from exc
    data = serializer.validated_data
    config = build_config(data)

    if 'sequence' in data:
        stimuli = expand_sequence(**data['sequence'])
    else:
        stimuli = [Stimulus(s['label'], s['rise'], s.get('width', DEFAULT_WIDTH)) for s in data['stimuli']]
    if data['design'] == 'B' and any(s.label == 'RESET' for s in stimuli):
        raise SchemaError("Design B has no reset input", {'stimuli': ['RESET is only available on Design A']})

    scenario = Scenario(
        design=data['design'],
        config=config,
        seed=data['seed'],
        jitter=data['jitter'],
        allow_violation=data['allow_violation'],
        source=source,
    )
    scenario.stimuli = apply_jitter(stimuli, scenario.jitter, scenario.seed)
    if scenario.jitter and not scenario.allow_violation:
        before = presentation_violations(config, pair_stimuli(stimuli))
        after = presentation_violations(config, scenario.events())
        introduced = [v for b, a in zip(before, after) for v in a if v not in b]
        if introduced or len(before) != len(after):
            raise SchemaError(
                f"Jitter of {scenario.jitter} ps breaks the timing envelope: {'; '.join(introduced)}",
                {'jitter': introduced},
            )
    logger.info("Loaded Design %s scenario with %d stimuli", scenario.design, len(scenario.stimuli))
    return scenario


def load_scenario(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"Cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"Scenario {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw, source=str(path))
