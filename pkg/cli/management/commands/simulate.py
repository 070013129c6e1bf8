from django.core.management.base import BaseCommand

from cli.forms import EXPERIMENTS
from cli.mixins import PipelineCommandMixin
from simulate.experiments import COVERAGE_METHODS


class Command(PipelineCommandMixin, BaseCommand):
    help = 'Run the interval-table experiments or a coverage study on generated data'
    subcommand = 'simulate'
    option_names = ('experiment', 'sizes', 'config', 'reps', 'method', 'n')

    def add_arguments(self, parser):
        parser.add_argument('--experiment', required=True, choices=EXPERIMENTS)
        parser.add_argument('--sizes', help='Comma separated sample sizes (tables only)')
        parser.add_argument('--config', help='Experiment YAML file (default simulate/defaults.yaml)')
        parser.add_argument('--reps', type=int, help='Coverage repetitions (default 200)')
        parser.add_argument('--method', choices=COVERAGE_METHODS, help='Coverage method (default residual)')
        parser.add_argument('--n', type=int, help='Coverage sample size (default 100)')
        self.add_common_arguments(parser)
