"""
Byte-identical reports for repeated runs, whatever the worker count.
"""
from io import StringIO

import pytest
from django.core.management import call_command


def run_command(name, **options):
    out = StringIO()
    call_command(name, stdout=out, **options)
    return out.getvalue()


def cars_options(cars_csv, **extra):
    return {'input': cars_csv, 'responses': 'mpg,disp,hp', 'predictors': 'cyl,am', 'factors': 'cyl,am', **extra}


@pytest.fixture
def invocations(cars_csv):
    return [
        ('fit', cars_options(cars_csv)),
        ('boot_fixed', cars_options(cars_csv, B=128, seed=7)),
        ('boot_pairs', cars_options(cars_csv, B=128, seed=7, format='json')),
        ('simulate', {'experiment': 'table2', 'sizes': '80', 'seed': 3}),
        ('simulate', {'experiment': 'coverage', 'method': 'pairs', 'n': 40, 'reps': 6, 'B': 50, 'seed': 3}),
        ('mallows_check', {'check': 'theorem3', 'n': 6, 'trials': 3, 'seed': 5}),
        ('mallows_check', {'check': 'lemmas', 'n': 20, 'trials': 12, 'seed': 5}),
    ]


def test_reports_ignore_worker_count(invocations, threads):
    for name, options in invocations:
        outputs = []
        for count in (1, 8, 8):
            with threads(count):
                outputs.append(run_command(name, **options))
        assert outputs[0] == outputs[1] == outputs[2], name
        assert outputs[0]
