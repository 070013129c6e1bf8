from dataclasses import dataclass

from django import forms
from django.core.exceptions import ValidationError

from core.exceptions import InvalidConfiguration
from simulate.experiments import COVERAGE_METHODS, TABLES

SUBCOMMANDS = ('fit', 'boot-fixed', 'boot-pairs', 'simulate', 'mallows-check')
DATA_SUBCOMMANDS = ('fit', 'boot-fixed', 'boot-pairs')
EXPERIMENTS = tuple(TABLES) + ('coverage',)
CHECKS = ('theorem3', 'lemmas', 'lemma6')
FORMATS = ('table', 'json')


def _choices(values):
    return [(value, value) for value in values]


def _split(value):
    return tuple(item.strip() for item in (value or '').split(',') if item.strip())


@dataclass(frozen=True)
class RunConfig:
    """One validated command-line invocation."""
    subcommand: str
    input: str = ''
    responses: tuple = ()
    predictors: tuple = ()
    factors: tuple = ()
    intercept: bool = True
    B: int = None
    alpha: float = None
    seed: int = None
    format: str = 'table'
    output: str = ''
    experiment: str = ''
    sizes: tuple = ()
    config: str = ''
    reps: int = None
    method: str = ''
    n: int = None
    check: str = ''
    trials: int = None
    p: int = None
    r: int = None

    def as_dict(self):
        """Echo printed in reports; the output path is not part of the result."""
        return {
            'subcommand': self.subcommand,
            'input': self.input,
            'responses': list(self.responses),
            'predictors': list(self.predictors),
            'factors': list(self.factors),
            'intercept': self.intercept,
            'B': self.B,
            'alpha': self.alpha,
            'seed': self.seed,
        }


class RunConfigForm(forms.Form):
    """
    Validates the parsed command-line options before anything runs.

    Column lists arrive as comma separated strings.
    """
    subcommand = forms.ChoiceField(choices=_choices(SUBCOMMANDS))
    input = forms.CharField(required=False)
    responses = forms.CharField(required=False, help_text="Comma separated response columns")
    predictors = forms.CharField(required=False, help_text="Comma separated predictor columns")
    factors = forms.CharField(required=False, help_text="Predictors to treatment-code")
    intercept = forms.BooleanField(required=False, initial=True)
    B = forms.IntegerField(required=False, min_value=2)
    alpha = forms.FloatField(required=False)
    seed = forms.IntegerField(required=False, min_value=0)
    format = forms.ChoiceField(required=False, choices=_choices(FORMATS))
    output = forms.CharField(required=False)

    experiment = forms.ChoiceField(required=False, choices=_choices(EXPERIMENTS))
    sizes = forms.CharField(required=False, help_text="Comma separated sample sizes")
    config = forms.CharField(required=False)
    reps = forms.IntegerField(required=False, min_value=1)
    method = forms.ChoiceField(required=False, choices=_choices(COVERAGE_METHODS))
    n = forms.IntegerField(required=False, min_value=2)
    check = forms.ChoiceField(required=False, choices=_choices(CHECKS))
    trials = forms.IntegerField(required=False, min_value=1)
    p = forms.IntegerField(required=False, min_value=1)
    r = forms.IntegerField(required=False, min_value=1)

    def clean_responses(self):
        return _split(self.cleaned_data.get('responses'))

    def clean_predictors(self):
        return _split(self.cleaned_data.get('predictors'))

    def clean_factors(self):
        return _split(self.cleaned_data.get('factors'))

    def clean_alpha(self):
        alpha = self.cleaned_data.get('alpha')
        if alpha is not None and not 0.0 < alpha < 1.0:
            raise ValidationError("alpha must lie strictly between 0 and 1.")
        return alpha

    def clean_sizes(self):
        sizes = []
        for item in _split(self.cleaned_data.get('sizes')):
            try:
                size = int(item)
            except ValueError:
                raise ValidationError(f"'{item}' is not a sample size.")
            if size < 2:
                raise ValidationError(f"sample size {size} is too small.")
            sizes.append(size)
        return tuple(sizes)

    def clean(self):
        cleaned_data = super().clean()
        subcommand = cleaned_data.get('subcommand')
        responses = cleaned_data.get('responses') or ()
        predictors = cleaned_data.get('predictors') or ()

        if subcommand in DATA_SUBCOMMANDS:
            if not cleaned_data.get('input'):
                raise ValidationError(f"{subcommand} needs --input.")
            if not responses:
                raise ValidationError(f"{subcommand} needs at least one response column.")
        overlap = sorted(set(responses) & set(predictors))
        if overlap:
            raise ValidationError(f"columns used as both response and predictor: {', '.join(overlap)}.")
        stray = [f for f in cleaned_data.get('factors') or () if f not in predictors]
        if stray:
            raise ValidationError(f"factor columns must also be predictors: {', '.join(stray)}.")
        if subcommand == 'simulate' and not cleaned_data.get('experiment'):
            raise ValidationError("simulate needs --experiment.")
        if subcommand == 'simulate' and cleaned_data.get('experiment') in TABLES and cleaned_data.get('B') is not None:
            raise ValidationError("the interval tables always use B = 4n; --B applies to coverage studies only.")
        if subcommand == 'mallows-check' and not cleaned_data.get('check'):
            raise ValidationError("mallows-check needs --check.")
        return cleaned_data

    def to_run_config(self):
        data = self.cleaned_data
        return RunConfig(
            subcommand=data['subcommand'],
            input=data['input'],
            responses=data['responses'],
            predictors=data['predictors'],
            factors=data['factors'],
            intercept=data['intercept'],
            B=data['B'],
            alpha=data['alpha'],
            seed=data['seed'],
            format=data['format'] or 'table',
            output=data['output'],
            experiment=data['experiment'],
            sizes=data['sizes'],
            config=data['config'],
            reps=data['reps'],
            method=data['method'],
            n=data['n'],
            check=data['check'],
            trials=data['trials'],
            p=data['p'],
            r=data['r'],
        )


def build_run_config(options):
    """Validate raw options into a RunConfig or raise InvalidConfiguration."""
    form = RunConfigForm(data={'intercept': True, **options})
    if not form.is_valid():
        problems = []
        for field, errors in form.errors.items():
            where = 'options' if field == '__all__' else field
            problems.extend(f"{where}: {error}" for error in errors)
        raise InvalidConfiguration('; '.join(problems))
    return form.to_run_config()
