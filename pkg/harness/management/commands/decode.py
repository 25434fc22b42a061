from django.core.management.base import BaseCommand

from circuits.simkernel import NS
from harness.cli import HANDLED_ERRORS, command_error, signed_time_argument, time_argument
from harness.decoder import decode_stream


class Command(BaseCommand):
    help = 'Decodes a symbol stream into bits with a Design A device trained on one offset'

    def add_arguments(self, parser):
        parser.add_argument(
            '--train-offset',
            type=signed_time_argument,
            default=10 * NS,
            help='Offset of B after A the device learns (negative: B first; default: 10ns)',
        )
        parser.add_argument('--stream', required=True, help='Symbols to decode, e.g. ABABBAAB')
        parser.add_argument('--width', type=time_argument, default=10 * NS, help='Pulse width (default: 10ns)')
        parser.add_argument(
            '--inter-pulse-delay',
            type=time_argument,
            default=10 * NS,
            help='Delay between the two pulses of a pair (default: 10ns)',
        )
        parser.add_argument(
            '--pattern-delay',
            type=time_argument,
            default=15 * NS,
            help='Quiet gap between pairs (default: 15ns)',
        )

    def handle(self, *args, **options):
        try:
            result = decode_stream(
                options['train_offset'], options['stream'].upper(),
                pulse_width=options['width'],
                inter_pulse_delay=options['inter_pulse_delay'],
                pattern_delay=options['pattern_delay'],
            )
        except HANDLED_ERRORS as exc:
            raise command_error(exc) from exc

        self.stdout.write(result.bits)
        if result.bit_rate is not None:
            self.stdout.write(self.style.SUCCESS(
                f"{len(result.bits)} bits, period {result.period} ps, {result.bit_rate_mbps:.2f} Mbit/s"
            ))
