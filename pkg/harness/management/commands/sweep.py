from django.core.management.base import BaseCommand, CommandError

from circuits.simkernel import NS
from harness.cli import HANDLED_ERRORS, command_error, time_argument
from harness.sweep import format_table, save_sweep, sweep_design_b, write_sweep_csv


class Command(BaseCommand):
    help = 'Sweeps the Design B training offset and reports the bias decision per offset'

    def add_arguments(self, parser):
        parser.add_argument('--design', default='b', help='Design to sweep (only b is swept)')
        parser.add_argument('--start', type=time_argument, default=10 * NS, help='First offset (default: 10ns)')
        parser.add_argument('--end', type=time_argument, default=50 * NS, help='Last offset, inclusive (default: 50ns)')
        parser.add_argument('--step', type=time_argument, default=1 * NS, help='Offset step (default: 1ns)')
        parser.add_argument('--width', type=time_argument, default=10 * NS, help='Pulse width (default: 10ns)')
        parser.add_argument('--workers', type=int, help='Evaluate rows through Celery when greater than 1')
        parser.add_argument('--mirrored', action='store_true', help='Sweep the mirrored instance (A after B)')
        parser.add_argument('--csv', help='Also write the table as CSV to this path')
        parser.add_argument('--save', action='store_true', help='Store the sweep in the database')

    def handle(self, *args, **options):
        if options['design'].lower() != 'b':
            raise CommandError("Only Design B has a bias sweep", returncode=1)
        try:
            table = sweep_design_b(
                options['start'], options['end'], options['step'],
                width=options['width'], workers=options.get('workers'), mirrored=options['mirrored'],
            )
            if options.get('csv'):
                write_sweep_csv(table, options['csv'])
        except HANDLED_ERRORS as exc:
            raise command_error(exc) from exc

        self.stdout.write(format_table(table))
        if options['save']:
            run = save_sweep(table)
            self.stdout.write(f"Saved as sweep run {run.pk}")

        counts = table.counts()
        summary = ', '.join(f"{name}: {counts[name]}" for name in sorted(counts)) or 'no rows'
        self.stdout.write(self.style.SUCCESS(f"Swept {len(table.rows)} offsets ({summary})"))
