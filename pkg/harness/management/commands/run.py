import json

from django.core.management.base import BaseCommand

from harness.cli import HANDLED_ERRORS, command_error
from harness.export import export_csv, export_vcd
from harness.runner import run_scenario
from harness.scenario import load_scenario


class Command(BaseCommand):
    help = 'Runs a scenario file and prints one outcome per presentation'

    def add_arguments(self, parser):
        parser.add_argument('scenario', help='Path to the scenario JSON file')
        parser.add_argument('--vcd', help='Write the traces as a VCD file to this path')
        parser.add_argument('--csv', help='Write the traces as CSV (time_ps,net,level) to this path')
        parser.add_argument(
            '--json',
            action='store_true',
            help='Print the run report as JSON instead of a list of outcomes',
        )

    def handle(self, *args, **options):
        try:
            scenario = load_scenario(options['scenario'])
            report = run_scenario(scenario)
            if options.get('vcd'):
                export_vcd(report.traces, options['vcd'], analog=report.analog, end=report.end_time)
            if options.get('csv'):
                export_csv(report.traces, options['csv'])
        except HANDLED_ERRORS as exc:
            raise command_error(exc) from exc

        if options.get('json'):
            self.stdout.write(json.dumps(report.as_dict(), indent=2))
            return

        for n, outcome in enumerate(report.outcomes, start=1):
            line = f"{n:>3}  {outcome.name}"
            if outcome.t_out is not None:
                line += f"  Vout at {outcome.t_out} ps"
            if outcome.unspecified:
                line += f"  [UNSPECIFIED_REGIME: {'; '.join(outcome.violations)}]"
            self.stdout.write(line)
        self.stdout.write(self.style.SUCCESS(
            f"Design {report.design}: {len(report.outcomes)} presentations, simulated to {report.end_time} ps"
        ))
