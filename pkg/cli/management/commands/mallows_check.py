from django.core.management.base import BaseCommand

from cli.forms import CHECKS
from cli.mixins import PipelineCommandMixin


class Command(PipelineCommandMixin, BaseCommand):
    help = 'Check the Mallows-metric bounds on seeded random instances'
    subcommand = 'mallows-check'
    option_names = ('check', 'trials', 'n', 'p', 'r')

    def add_arguments(self, parser):
        parser.add_argument('--check', required=True, choices=CHECKS)
        parser.add_argument('--trials', type=int, help='Cloud pairs, lemma repetitions or lemma6 instances')
        parser.add_argument('--n', type=int)
        parser.add_argument('--p', type=int)
        parser.add_argument('--r', type=int)
        parser.add_argument('--seed', type=int, help='Master seed')
        parser.add_argument('--format', choices=['table', 'json'], default='table')
        parser.add_argument('--output', default='', help='Write the report here instead of stdout')
