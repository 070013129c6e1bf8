import sys
from pathlib import Path

from django.core.management.base import CommandError

from core.exceptions import MvbootError

from .forms import build_run_config
from .pipeline import run
from .reports import error_line


class DataOptionsMixin:
    """
    Adds the dataset flags shared by fit, boot_fixed and boot_pairs.
    """

    def add_data_arguments(self, parser):
        parser.add_argument('--input', required=True, help='CSV file with a header row')
        parser.add_argument('--responses', required=True, help='Comma separated response columns')
        parser.add_argument('--predictors', default='', help='Comma separated predictor columns')
        parser.add_argument('--factors', default='', help='Predictors to treatment-code (alphabetical reference)')
        parser.add_argument('--no-intercept', action='store_true', help='Do not prepend a column of ones')


class PipelineCommandMixin:
    """
    Turns parsed options into a RunConfig, runs the pipeline and writes the
    report. Failures carry one JSON line and the error family's exit code.
    """
    subcommand = None
    option_names = ()

    def add_common_arguments(self, parser):
        parser.add_argument('--B', type=int, dest='B', help='Bootstrap replicates (default 4n)')
        parser.add_argument('--alpha', type=float, help='Nominal miscoverage (default 0.05)')
        parser.add_argument('--seed', type=int, help='Master seed')
        parser.add_argument('--format', choices=['table', 'json'], default='table')
        parser.add_argument('--output', default='', help='Write the report here instead of stdout')

    def get_run_options(self, options):
        values = {name: options.get(name) for name in self.option_names}
        for name in ('B', 'alpha', 'seed', 'format', 'output'):
            values[name] = options.get(name)
        if 'no_intercept' in options:
            values['intercept'] = not options['no_intercept']
        values['subcommand'] = self.subcommand
        return {name: value for name, value in values.items() if value is not None}

    def fail(self, line, status):
        """
        From a shell, print the bare JSON line on stderr and exit with the
        family code; from ``call_command``, raise it as a CommandError.
        """
        if self._called_from_command_line:
            self.stderr.write(line)
            sys.exit(status)
        raise CommandError(line, returncode=status)

    def handle(self, *args, **options):
        try:
            cfg = build_run_config(self.get_run_options(options))
        except MvbootError as exc:
            self.fail(error_line(exc), exc.exit_code)
        status, report = run(cfg)
        if status != 0:
            self.fail(report, status)
        if cfg.output:
            Path(cfg.output).write_text(report, encoding='utf-8')
        else:
            self.stdout.write(report, ending='')
