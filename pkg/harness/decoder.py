"""
Serial decoder built on a trained Design A device.

The symbol stream is framed into consecutive pairs. Each pair is presented
once the previous pair's decision window (later rise + output latency +
output width) has closed and the pattern delay has passed, and yields a 1
when it is recognized.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from circuits.design_a import DesignA
from circuits.exceptions import InvariantViolation
from circuits.outcomes import OutcomeKind
from circuits.simkernel import NS
from .exceptions import OddLengthStream, SchemaError

logger = logging.getLogger(__name__)

SYMBOLS = frozenset('AB')
MAX_TRAINING_PRESENTATIONS = 3


@dataclass
class DecodeResult:
    bits: str
    period: Optional[int] = None
    bit_rate: Optional[Fraction] = None
    frames: list = field(default_factory=list)

    @property
    def bit_rate_mbps(self):
        return None if self.bit_rate is None else float(self.bit_rate) / 1e6


def train_device(device, trained_offset, width):
    """Present the trained offset until the device enters active mode."""
    for _ in range(MAX_TRAINING_PRESENTATIONS):
        device.present_offset(trained_offset, width)
        if device.active:
            return device
    raise InvariantViolation(
        f"Device did not learn offset {trained_offset} ps within {MAX_TRAINING_PRESENTATIONS} presentations"
    )


def decode_stream(trained_offset, stream, pulse_width=10 * NS, inter_pulse_delay=10 * NS,
                  pattern_delay=15 * NS, config=None, device=None):
    """
    Decode ``stream`` into one bit per symbol pair.

    A pair of identical symbols cannot be an A/B sequence and decodes as 0
    without being presented; its frame still takes a full bit period.
    """
    if len(stream) % 2:
        raise OddLengthStream(f"Stream of {len(stream)} symbols cannot be framed into pairs")
    invalid = set(stream) - SYMBOLS
    if invalid:
        raise SchemaError(f"Stream contains symbols {sorted(invalid)} outside A/B")

    if device is None:
        device = train_device(DesignA(config), trained_offset, pulse_width)
    window = device.config.latency + device.config.output_width

    t = device.next_start()
    first_start = t
    bits = []
    frames = []
    for i in range(0, len(stream), 2):
        pair = stream[i:i + 2]
        second = t + inter_pulse_delay
        window_end = second + window
        if pair == 'AB':
            outcome = device.present(t, second, pulse_width, until=window_end)
        elif pair == 'BA':
            outcome = device.present(second, t, pulse_width, until=window_end)
        else:
            outcome = None
            device.sim.run_until(max(device.sim.now, window_end))
        bit = '1' if outcome is not None and outcome.kind is OutcomeKind.RECOGNIZED else '0'
        bits.append(bit)
        frames.append((pair, t, outcome))
        t = window_end + pattern_delay

    result = DecodeResult(''.join(bits), frames=frames)
    if frames:
        result.period = (t - first_start) // len(frames)
        result.bit_rate = Fraction(10 ** 12 * len(frames), t - first_start)
        logger.info(
            "Decoded %s -> %s at %.2f Mbit/s", stream, result.bits, result.bit_rate_mbps,
        )
    return result
