import json
import re
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from core.exceptions import EmptyData, InvalidConfiguration, MissingColumn, NonNumericCell, \
    RankDeficientAfterEncoding, SingularDesign
from regression.ols import fit_ols

from .forms import build_run_config
from .ingest import INTERCEPT, ingest_csv
from .management.commands.fit import Command as FitCommand
from .pipeline import run
from .reports import round_half_up

CARS = str(settings.BASE_DIR / 'data' / 'mtcars.csv')
CARS_OPTIONS = {
    'input': CARS,
    'responses': 'mpg,disp,hp',
    'predictors': 'cyl,am',
    'factors': 'cyl,am',
}
INTERVAL = re.compile(r'\((-?\d+\.\d+), (-?\d+\.\d+)\)')


def command_output(name, **options):
    out = StringIO()
    call_command(name, stdout=out, **options)
    return out.getvalue()


class CsvFileMixin:
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_csv(self, content, name='data.csv'):
        path = Path(self.tmp.name) / name
        path.write_text(content, encoding='utf-8')
        return str(path)


class IngestCsvTests(CsvFileMixin, SimpleTestCase):
    def test_cars_design(self):
        """Test cyl (3 levels) and am (2 levels) with an intercept give p = 4"""
        data = ingest_csv(CARS, ['mpg', 'disp', 'hp'], ['cyl', 'am'], ['cyl', 'am'])
        self.assertEqual((data.n, data.p, data.r), (32, 4, 3))
        self.assertEqual(data.predictor_names, (INTERCEPT, 'cyl6', 'cyl8', 'am1'))
        self.assertEqual(data.metadata['factors']['cyl'], {'levels': ['4', '6', '8'], 'reference': '4'})
        self.assertEqual(data.labels[:4], ('mpg:(Intercept)', 'disp:(Intercept)', 'hp:(Intercept)', 'mpg:cyl6'))
        np.testing.assert_array_equal(data.X[:, 0], np.ones(32))
        # Mazda RX4 is a 6-cylinder manual
        np.testing.assert_array_equal(data.X[0], [1.0, 1.0, 0.0, 1.0])

    def test_numeric_predictor_without_intercept(self):
        path = self.write_csv("y,x\n1.5,2\n2.5,4\n3.0,5\n")
        data = ingest_csv(path, ['y'], ['x'], intercept=False)
        np.testing.assert_array_equal(data.X, [[2.0], [4.0], [5.0]])
        self.assertEqual(data.predictor_names, ('x',))

    def test_single_level_factor(self):
        path = self.write_csv("y,g\n1,a\n2,a\n3,a\n")
        with self.assertRaises(RankDeficientAfterEncoding):
            ingest_csv(path, ['y'], ['g'], ['g'])

    def test_collinear_numeric_columns_reach_the_fit(self):
        path = self.write_csv("y,x,z\n1,1,2\n2,2,4\n4,3,6\n3,5,10\n")
        data = ingest_csv(path, ['y'], ['x', 'z'])
        with self.assertRaises(SingularDesign):
            fit_ols(data)

    def test_dummy_colliding_with_numeric_column(self):
        path = self.write_csv("y,x,g\n1,0,a\n2,1,b\n4,0,a\n3,1,b\n")
        with self.assertRaises(RankDeficientAfterEncoding):
            ingest_csv(path, ['y'], ['x', 'g'], ['g'])

    def test_missing_column(self):
        with self.assertRaises(MissingColumn):
            ingest_csv(CARS, ['mpg'], ['weight'])

    def test_non_numeric_cell_reports_position(self):
        path = self.write_csv("y,x\n1,2\n2,abc\n3,4\n5,6\n")
        with self.assertRaises(NonNumericCell) as cm:
            ingest_csv(path, ['y'], ['x'])
        self.assertEqual((cm.exception.row, cm.exception.column, cm.exception.value), (2, 'x', 'abc'))

    def test_empty_cell_is_not_a_number(self):
        path = self.write_csv("y,x\n1,2\n,3\n3,4\n5,6\n")
        with self.assertRaises(NonNumericCell):
            ingest_csv(path, ['y'], ['x'])

    def test_header_only(self):
        with self.assertRaises(EmptyData):
            ingest_csv(self.write_csv("y,x\n"), ['y'], ['x'])

    def test_empty_file(self):
        with self.assertRaises(EmptyData):
            ingest_csv(self.write_csv(""), ['y'], ['x'])

    def test_overlapping_columns(self):
        with self.assertRaises(InvalidConfiguration):
            ingest_csv(CARS, ['mpg'], ['mpg', 'cyl'])


class CarsFitTests(SimpleTestCase):
    def test_cylinder_group_means(self):
        """Test lm(mpg ~ factor(cyl)): 26.66364, -6.92078, -11.56364"""
        fit = fit_ols(ingest_csv(CARS, ['mpg'], ['cyl'], ['cyl']))
        np.testing.assert_allclose(fit.beta_hat[0], [26.66364, -6.92078, -11.56364], atol=1e-3)

    def test_matches_least_squares_oracle(self):
        data = ingest_csv(CARS, ['mpg', 'disp', 'hp'], ['cyl', 'am'], ['cyl', 'am'])
        expected, *_ = np.linalg.lstsq(data.X, data.Y, rcond=None)
        np.testing.assert_allclose(fit_ols(data).beta_hat, expected.T, rtol=1e-9, atol=1e-9)


class RunConfigFormTests(SimpleTestCase):
    def test_valid_options(self):
        cfg = build_run_config({'subcommand': 'boot-fixed', 'B': 128, 'seed': 7, **CARS_OPTIONS})
        self.assertEqual(cfg.responses, ('mpg', 'disp', 'hp'))
        self.assertEqual(cfg.factors, ('cyl', 'am'))
        self.assertTrue(cfg.intercept)
        self.assertEqual(cfg.format, 'table')

    def test_disjoint_columns(self):
        with self.assertRaises(InvalidConfiguration):
            build_run_config({'subcommand': 'fit', 'input': CARS, 'responses': 'mpg', 'predictors': 'mpg'})

    def test_too_few_replicates(self):
        with self.assertRaises(InvalidConfiguration):
            build_run_config({'subcommand': 'boot-fixed', 'B': 1, **CARS_OPTIONS})

    def test_alpha_range(self):
        with self.assertRaises(InvalidConfiguration):
            build_run_config({'subcommand': 'boot-fixed', 'alpha': 1.5, **CARS_OPTIONS})

    def test_data_commands_need_input(self):
        with self.assertRaises(InvalidConfiguration):
            build_run_config({'subcommand': 'fit', 'responses': 'mpg'})

    def test_factor_must_be_predictor(self):
        with self.assertRaises(InvalidConfiguration):
            build_run_config({'subcommand': 'fit', 'input': CARS, 'responses': 'mpg', 'predictors': 'hp',
                              'factors': 'cyl'})

    def test_table_experiments_reject_replicate_count(self):
        with self.assertRaises(InvalidConfiguration):
            build_run_config({'subcommand': 'simulate', 'experiment': 'table1', 'B': 500})
        cfg = build_run_config({'subcommand': 'simulate', 'experiment': 'coverage', 'B': 500})
        self.assertEqual(cfg.B, 500)

    def test_sizes_parse(self):
        cfg = build_run_config({'subcommand': 'simulate', 'experiment': 'table1', 'sizes': '100, 500'})
        self.assertEqual(cfg.sizes, (100, 500))


class RoundingTests(SimpleTestCase):
    def test_half_up(self):
        self.assertEqual(str(round_half_up(2.7345)), '2.735')
        self.assertEqual(str(round_half_up(0.0005)), '0.001')
        self.assertEqual(str(round_half_up(-2.7345)), '-2.735')

    def test_no_negative_zero(self):
        self.assertEqual(str(round_half_up(-0.0001)), '0.000')


class PipelineTests(SimpleTestCase):
    def test_error_status(self):
        cfg = build_run_config({'subcommand': 'fit', 'input': CARS, 'responses': 'mpg', 'predictors': 'weight'})
        status, line = run(cfg)
        self.assertEqual(status, 3)
        self.assertEqual(json.loads(line)['error'], 'MissingColumn')

    def test_fit_reports_coefficients(self):
        cfg = build_run_config({'subcommand': 'fit', 'format': 'json', **CARS_OPTIONS})
        status, text = run(cfg)
        self.assertEqual(status, 0)
        payload = json.loads(text)
        self.assertEqual(len(payload['coefficients']), 12)
        self.assertEqual(
            [(c['response'], c['predictor']) for c in payload['coefficients'][:5]],
            [('mpg', INTERCEPT), ('mpg', 'cyl6'), ('mpg', 'cyl8'), ('mpg', 'am1'), ('disp', INTERCEPT)],
        )
        self.assertEqual(len(payload['sigma_hat']), 3)


class BootCommandTests(CsvFileMixin, SimpleTestCase):
    options = {'B': 128, 'seed': 7, **CARS_OPTIONS}

    def test_repeatable_output(self):
        first = command_output('boot_fixed', **self.options)
        second = command_output('boot_fixed', **self.options)
        self.assertEqual(first, second)
        self.assertIn('percentile', first)
        self.assertIn('normal-fixed', first)
        self.assertIn('reference levels cyl=4, am=0', first)

    def test_worker_count_does_not_change_output(self):
        outputs = []
        for threads in (1, 8):
            with override_settings(MVBOOT={**settings.MVBOOT, 'THREADS': threads}):
                outputs.append(command_output('boot_pairs', **self.options))
        self.assertEqual(outputs[0], outputs[1])

    @override_settings(MVBOOT={**settings.MVBOOT, 'THREADS': 'many'})
    def test_bad_thread_count_exit_code(self):
        with self.assertRaises(CommandError) as cm:
            command_output('boot_pairs', **self.options)
        self.assertEqual(cm.exception.returncode, 2)
        self.assertEqual(json.loads(str(cm.exception))['error'], 'InvalidConfiguration')

    def test_json_matches_table(self):
        """Test the JSON endpoints are exactly the printed ones"""
        table = command_output('boot_fixed', **self.options)
        payload = json.loads(command_output('boot_fixed', format='json', **self.options))
        printed = [[tuple(float(v) for v in pair) for pair in INTERVAL.findall(line)]
                   for line in table.splitlines() if INTERVAL.search(line)]
        self.assertEqual(len(printed), 12)
        for column, intervals in enumerate(payload['intervals']):
            self.assertEqual(
                [(c['lower'], c['upper']) for c in intervals['components']],
                [row[column] for row in printed],
            )
        self.assertEqual(payload['seed'], 7)
        self.assertEqual(payload['intervals'][0]['components'][1]['label'], 'disp:(Intercept)')

    def test_point_estimates_inside_intervals(self):
        payload = json.loads(command_output('boot_fixed', format='json', **self.options))
        data = ingest_csv(CARS, ['mpg', 'disp', 'hp'], ['cyl', 'am'], ['cyl', 'am'])
        point = fit_ols(data).vec_beta
        for intervals in payload['intervals']:
            lower = np.array([c['lower'] for c in intervals['components']])
            upper = np.array([c['upper'] for c in intervals['components']])
            self.assertTrue(np.all(lower - 1e-3 <= point))
            self.assertTrue(np.all(point <= upper + 1e-3))

    def test_output_file(self):
        path = Path(self.tmp.name) / 'report.txt'
        out = command_output('boot_pairs', output=str(path), **self.options)
        self.assertEqual(out, '')
        self.assertIn('normal-sandwich', path.read_text(encoding='utf-8'))

    def test_missing_column_exit_code(self):
        with self.assertRaises(CommandError) as cm:
            command_output('boot_fixed', input=CARS, responses='mpg', predictors='weight')
        self.assertEqual(cm.exception.returncode, 3)
        self.assertEqual(json.loads(str(cm.exception))['error'], 'MissingColumn')

    def test_bad_alpha_exit_code(self):
        with self.assertRaises(CommandError) as cm:
            command_output('boot_fixed', alpha=1.5, **CARS_OPTIONS)
        self.assertEqual(cm.exception.returncode, 2)

    def test_too_few_draws_exit_code(self):
        """Test B=10 at alpha 0.05 leaves no room for the lower percentile"""
        with self.assertRaises(CommandError) as cm:
            command_output('boot_fixed', B=10, **CARS_OPTIONS)
        self.assertEqual(cm.exception.returncode, 5)

    def test_singular_design_exit_code(self):
        path = self.write_csv("y,x\n1,0\n2,0\n3,0\n")
        with self.assertRaises(CommandError) as cm:
            command_output('fit', input=path, responses='y', predictors='x', no_intercept=True)
        self.assertEqual(cm.exception.returncode, 4)
        self.assertEqual(json.loads(str(cm.exception))['error'], 'SingularDesign')

    def test_dummy_collision_exit_code(self):
        path = self.write_csv("y,x,g\n1,0,a\n2,1,b\n4,0,a\n3,1,b\n")
        with self.assertRaises(CommandError) as cm:
            command_output('fit', input=path, responses='y', predictors='x,g', factors='g')
        self.assertEqual(cm.exception.returncode, 3)


class SimulateCommandTests(SimpleTestCase):
    def test_table_experiment(self):
        payload = json.loads(command_output('simulate', experiment='table1', sizes='40', seed=5, format='json'))
        self.assertEqual(payload['experiment'], 'table1')
        self.assertEqual(payload['blocks'][0]['n'], 40)
        methods = [block['method'] for block in payload['blocks'][0]['intervals']]
        self.assertEqual(methods, ['percentile', 'normal-fixed'])
        self.assertIn('version', payload['config'])

    def test_table_experiment_with_replicate_count_exit_code(self):
        with self.assertRaises(CommandError) as cm:
            command_output('simulate', experiment='table2', sizes='40', B=100)
        self.assertEqual(cm.exception.returncode, 2)

    def test_coverage_repeatable(self):
        options = {'experiment': 'coverage', 'method': 'normal-sandwich', 'n': 40, 'reps': 5, 'seed': 2}
        self.assertEqual(command_output('simulate', **options), command_output('simulate', **options))


class MallowsCheckCommandTests(SimpleTestCase):
    def test_lemma6_instances(self):
        payload = json.loads(command_output('mallows_check', check='lemma6', trials=3, seed=4, format='json'))
        self.assertEqual(len(payload['reports']), 3)
        self.assertTrue(payload['pass'])

    def test_theorem3_table(self):
        out = command_output('mallows_check', check='theorem3', n=6, p=2, r=2, seed=1)
        self.assertIn('theorem3', out)
        self.assertIn('estimate', out)


class CommandLineErrorTests(SimpleTestCase):
    def test_stderr_carries_bare_json(self):
        err = StringIO()
        command = FitCommand(stderr=err)
        with self.assertRaises(SystemExit) as cm:
            command.run_from_argv(['manage.py', 'fit', '--input', CARS, '--responses', 'mpg', '--predictors', 'weight'])
        self.assertEqual(cm.exception.code, 3)
        line = err.getvalue().strip()
        self.assertNotIn('CommandError', line)
        payload = json.loads(line)
        self.assertEqual((payload['error'], payload['exit_code']), ('MissingColumn', 3))
        self.assertIn('weight', payload['detail'])
