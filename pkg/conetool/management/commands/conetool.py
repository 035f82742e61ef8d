from django.core.management.base import BaseCommand, CommandError

from conetool.conf import BUILTIN_BUDGETS
from conetool.exceptions import ContractError, DichotomyViolation, ScenarioError
from conetool.scenario import BUNDLED_SCENARIOS, load_scenario
from conetool.services import COMMANDS, ExitStatus, error_report, run_command, run_demo


class Command(BaseCommand):
    help = 'Run a cone-tiling command on a scenario file and print a JSON report.'

    def add_arguments(self, parser):
        parser.add_argument('subcommand', metavar='command', choices=sorted(COMMANDS) + ['demo'],
                            help="Command to run, or 'demo' to run a bundled battery")
        parser.add_argument('scenario', type=str,
                            help=f"Scenario file or bundled name ({', '.join(BUNDLED_SCENARIOS)}); "
                                 f"for 'demo' the demo name")

        # Budgets
        parser.add_argument('--radius', type=int, help="Orbit ball radius")
        parser.add_argument('--fuel', type=int, help="Greedy reduction steps per point")
        parser.add_argument('--samples', type=int, help="Number of sampled interior points")
        parser.add_argument('--seed', type=int, help="Sampler seed")

        parser.add_argument('--human', action='store_true', help="Print the summary instead of JSON")

    def handle(self, *args, **options):
        command = options['subcommand']
        target = options['scenario']
        overrides = {key: options[key] for key in BUILTIN_BUDGETS if options.get(key) is not None}
        for key, value in overrides.items():
            if value < (0 if key in ('radius', 'seed') else 1):
                raise CommandError(f"--{key} must not be {value}", returncode=ExitStatus.INPUT_ERROR)

        try:
            if command == 'demo':
                report = run_demo(target, overrides)
            else:
                report = run_command(command, load_scenario(target), overrides)
        except ScenarioError as e:
            for line in e.errors:
                self.stderr.write(line)
            report = error_report(command, target, e, ExitStatus.INPUT_ERROR)
        except ContractError as e:
            report = error_report(command, target, e, ExitStatus.INPUT_ERROR)
        except DichotomyViolation as e:
            report = error_report(command, target, e, ExitStatus.REFUTED)

        if options['human']:
            self.stdout.write('\n'.join(report.summary))
        else:
            self.stdout.write(report.to_json())

        if report.status != ExitStatus.VERIFIED:
            raise CommandError(
                f"{command} {target} finished with status {report.status}",
                returncode=report.status,
            )
