import logging
from dataclasses import dataclass, field

from circuits.conf import settle_window
from circuits.design_a import DesignA
from circuits.design_b import DesignB
from .scenario import ResetEvent

logger = logging.getLogger(__name__)

EXIT_SCENARIO_ERROR = 1
EXIT_INVARIANT_VIOLATION = 2


@dataclass
class RunReport:
    design: str
    outcomes: list = field(default_factory=list)
    traces: dict = field(default_factory=dict)
    analog: dict = field(default_factory=dict)
    end_time: int = 0

    @property
    def outcome_names(self):
        return [outcome.name for outcome in self.outcomes]

    def as_dict(self):
        return {
            'design': self.design,
            'outcomes': [outcome.as_dict() for outcome in self.outcomes],
            'end_time_ps': self.end_time,
        }


def build_design(scenario):
    if scenario.design == 'A':
        return DesignA(scenario.config)
    return DesignB(scenario.config)


def run_scenario(scenario):
    """
    Present every pair of the scenario in time order and collect one outcome each.

    A presentation runs until the next event starts or it has settled,
    whichever comes first, so its outcome covers that window only.
    """
    device = build_design(scenario)
    sim = device.sim
    report = RunReport(design=scenario.design)
    events = scenario.events()

    for i, event in enumerate(events):
        next_start = events[i + 1].start if i + 1 < len(events) else None
        if isinstance(event, ResetEvent):
            settled = event.at + settle_window()
            until = settled if next_start is None else min(settled, next_start)
            device.reset(at=event.at, until=until)
        else:
            settled = event.end + settle_window()
            until = settled if next_start is None else min(settled, next_start)
            report.outcomes.append(device.present(event.a_rise, event.b_rise, event.width, until=until))
        if until == settled:
            device.check_invariants()

    device.check_invariants()
    report.traces = sim.traces()
    report.analog = {name: list(series) for name, series in sim.analog.items()}
    report.end_time = sim.now
    logger.info(
        "Design %s scenario: %d presentations -> %s",
        scenario.design, len(report.outcomes), ', '.join(report.outcome_names) or 'no outcomes',
    )
    return report
