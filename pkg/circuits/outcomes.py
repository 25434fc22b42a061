from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class OutcomeKind(Enum):
    TRAINED = 'TRAINED'
    ENTERED_ACTIVE = 'ENTERED_ACTIVE'
    RECOGNIZED = 'RECOGNIZED'
    NO_MATCH = 'NO_MATCH'


class BiasDecision(Enum):
    SET_20NS = 'SET_20NS'
    SET_40NS = 'SET_40NS'
    KEEP_DEFAULT = 'KEEP_DEFAULT'
    FAILED = 'FAILED'


UNSPECIFIED_REGIME = 'UNSPECIFIED_REGIME'


@dataclass(frozen=True)
class Outcome:
    """Result of one presentation of an input pair."""
    kind: object
    t_out: Optional[int] = None
    tap_delay: Optional[int] = None
    bias_mV: Optional[int] = None
    node: Optional[int] = None
    flags: frozenset = field(default_factory=frozenset)
    violations: tuple = ()

    @property
    def name(self):
        return self.kind.value

    @property
    def unspecified(self):
        return UNSPECIFIED_REGIME in self.flags

    def as_dict(self):
        return {
            'outcome': self.name,
            't_out_ps': self.t_out,
            'tap_delay_ps': self.tap_delay,
            'bias_mV': self.bias_mV,
            'node': self.node,
            'flags': sorted(self.flags),
            'violations': list(self.violations),
        }
