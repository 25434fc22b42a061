from django.core.management.base import BaseCommand

from harness.cli import HANDLED_ERRORS, command_error
from harness.fom import FomMode, estimate_fom


class Command(BaseCommand):
    help = 'Estimates detect throughput (operations per second) of a design'

    def add_arguments(self, parser):
        parser.add_argument('--design', choices=['a', 'b', 'A', 'B'], required=True)
        parser.add_argument(
            '--mode',
            choices=[mode.value for mode in FomMode],
            default=FomMode.SEQUENTIAL.value,
            help='sequential waits for Vout before the next pair; overlapped pipelines pairs',
        )
        parser.add_argument('--repetitions', type=int, help='Detect operations to simulate (default: FOM_REPETITIONS)')

    def handle(self, *args, **options):
        try:
            report = estimate_fom(options['design'], options['mode'], options.get('repetitions'))
        except HANDLED_ERRORS as exc:
            raise command_error(exc) from exc

        self.stdout.write(f"Design {report.design}, {report.mode.value}")
        self.stdout.write(f"  detect period:  {report.op_period} ps")
        self.stdout.write(f"  operations/s:   {float(report.ops_per_second):.3g}")
        if report.reset_period:
            self.stdout.write(f"  reset period:   {report.reset_period} ps")
        if report.expected is not None:
            self.stdout.write(f"  reference:      {report.expected:.3g} ops/s ({report.deviation:.0%} off)")
            if not report.within_tolerance():
                self.stdout.write(self.style.WARNING("  outside the accepted tolerance"))
        self.stdout.write(self.style.SUCCESS(report.note))
