"""
Plain-text tables and JSON documents for every subcommand.

Both formats are built from the same rounded numbers, so a JSON report
re-parsed holds exactly the endpoints printed in table mode.
"""
import json
from decimal import ROUND_HALF_UP, Decimal

from django.core.serializers.json import DjangoJSONEncoder

from core.conf import mvboot_setting


def round_half_up(value, decimals=None):
    decimals = mvboot_setting('REPORT_DECIMALS') if decimals is None else decimals
    rounded = Decimal(repr(float(value))).quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP)
    # no "-0.000"
    return rounded if rounded else abs(rounded)


def number(value):
    return float(round_half_up(value))


def text(value):
    return str(round_half_up(value))


def to_json(payload):
    return json.dumps(payload, cls=DjangoJSONEncoder, indent=2) + '\n'


def aligned(header, rows):
    """Left-align the first column, right-align the rest."""
    widths = [max(len(str(row[i])) for row in [header] + rows) for i in range(len(header))]
    lines = []
    for row in [header] + rows:
        cells = [str(row[0]).ljust(widths[0])] + [str(cell).rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append('  '.join(cells).rstrip())
    return lines


# Intervals

def interval_payload(table):
    return {
        'method': table.method,
        'alpha': table.alpha,
        'components': [
            {'label': label, 'lower': number(lo), 'upper': number(hi)}
            for label, lo, hi in zip(table.labels, table.lower, table.upper)
        ],
    }


def interval_pair(table, i):
    return f"({text(table.lower[i])}, {text(table.upper[i])})"


def interval_rows(tables):
    """Side-by-side rows, one per vec(β) component, one column per method."""
    header = ['component'] + [table.method for table in tables]
    rows = [[label] + [interval_pair(table, i) for table in tables] for i, label in enumerate(tables[0].labels)]
    return aligned(header, rows)


def coding_line(metadata):
    factors = metadata.get('factors') or {}
    intercept = 'on' if metadata.get('intercept') else 'off'
    if not factors:
        return f"# coding: no factors; intercept {intercept}"
    references = ', '.join(f"{column}={encoding['reference']}" for column, encoding in factors.items())
    return f"# coding: {metadata.get('coding', 'treatment')} contrasts, reference levels {references}; intercept {intercept}"


def data_lines(data):
    return [
        f"# data: {data.metadata.get('source', '')}  n={data.n}  p={data.p}  r={data.r}",
        coding_line(data.metadata),
    ]


def data_payload(data):
    return {
        'source': data.metadata.get('source', ''),
        'n': data.n,
        'p': data.p,
        'r': data.r,
        'responses': list(data.response_names),
        'predictors': list(data.predictor_names),
        'coding': data.metadata.get('coding', 'treatment'),
        'intercept': data.metadata.get('intercept'),
        'factors': data.metadata.get('factors', {}),
    }


def bootstrap_report(command, data, draws, tables, config):
    payload = {
        'command': command,
        'data': data_payload(data),
        'config': config,
        'seed': draws.config.seed,
        'bootstrap': draws.provenance(),
        'intervals': [interval_payload(table) for table in tables],
    }
    lines = [f"# {command}: {' vs '.join(table.method for table in tables)}"]
    lines += data_lines(data)
    lines.append(f"# B={draws.B}  seed={draws.config.seed}  alpha={draws.config.alpha}")
    if draws.redraws:
        lines.append(f"# singular resamples redrawn: {draws.redraws}")
    lines += interval_rows(tables)
    return payload, '\n'.join(lines) + '\n'


# Fit

def fit_report(data, fit, config):
    payload = {
        'command': 'fit',
        'data': data_payload(data),
        'config': config,
        'coefficients': [
            {'response': response, 'predictor': predictor, 'estimate': number(fit.beta_hat[i, j])}
            for i, response in enumerate(data.response_names)
            for j, predictor in enumerate(data.predictor_names)
        ],
        'sigma_hat': [[number(v) for v in row] for row in fit.sigma_hat],
    }
    lines = ['# fit: ordinary least squares'] + data_lines(data)
    lines.append('# coefficients (rows: responses, columns: predictors)')
    lines += aligned(
        [''] + list(data.predictor_names),
        [[response] + [text(v) for v in fit.beta_hat[i]] for i, response in enumerate(data.response_names)],
    )
    lines.append('# residual covariance')
    lines += aligned(
        [''] + list(data.response_names),
        [[response] + [text(v) for v in fit.sigma_hat[i]] for i, response in enumerate(data.response_names)],
    )
    return payload, '\n'.join(lines) + '\n'


# Simulation

def table_experiment_report(blocks):
    payload = {
        'command': 'simulate',
        'experiment': blocks.which,
        'seed': blocks.seed,
        'config': blocks.config,
        'blocks': [
            {'n': row.n, 'intervals': [interval_payload(row.bootstrap), interval_payload(row.closed_form)]}
            for row in blocks.rows
        ],
    }
    lines = [f"# simulate {blocks.which}: {' vs '.join(blocks.methods)}", f"# seed={blocks.seed}"]
    for row in blocks.rows:
        lines.append(f"n = {row.n}")
        lines += interval_rows([row.bootstrap, row.closed_form])
    return payload, '\n'.join(lines) + '\n'


def coverage_report(report, config):
    payload = {'command': 'simulate', 'experiment': 'coverage', 'config': config, **report.to_dict()}
    for component in payload['components']:
        component['coverage'] = number(component['coverage'])
        component['mean_width'] = number(component['mean_width'])
    lines = [
        f"# simulate coverage: {report.method}",
        f"# n={report.n}  reps={report.reps}  alpha={report.alpha}  seed={report.seed}",
    ]
    lines += aligned(
        ['component', 'coverage', 'mean width'],
        [[c['label'], text(c['coverage']), text(c['mean_width'])] for c in payload['components']],
    )
    return payload, '\n'.join(lines) + '\n'


# Bound checks

def bounds_report(check, reports, instance):
    entries = []
    for report in reports:
        entry = report.to_dict()
        entry['check'] = report.check
        entries.append(entry)
    payload = {
        'command': 'mallows-check',
        'check': check,
        'instance': instance,
        'pass': all(entry['pass'] for entry in entries),
        'reports': entries,
    }
    lines = [f"# mallows-check {check}: " + '  '.join(f"{k}={v}" for k, v in instance.items())]
    lines += aligned(
        ['check', 'estimate', 'bound', 'slack', 'pass'],
        [[r.check, f"{r.estimate:.6g}", f"{r.bound:.6g}", f"{r.slack:.6g}", 'yes' if r.passed else 'NO'] for r in reports],
    )
    return payload, '\n'.join(lines) + '\n'


def error_line(exc):
    return json.dumps(exc.as_dict(), cls=DjangoJSONEncoder)
