from django.core.management.base import BaseCommand

from cli.mixins import DataOptionsMixin, PipelineCommandMixin


class Command(DataOptionsMixin, PipelineCommandMixin, BaseCommand):
    help = 'Fit multivariate OLS to a CSV file and print the coefficient matrix and residual covariance'
    subcommand = 'fit'
    option_names = ('input', 'responses', 'predictors', 'factors')

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        self.add_common_arguments(parser)
