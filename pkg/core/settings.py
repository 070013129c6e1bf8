"""
Django settings for the mvboot project.

mvboot has no web surface: the project exists to host the inference apps,
their management commands and a single configuration block (``MVBOOT``).

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: nothing here signs data, but Django insists on a key.
SECRET_KEY = os.environ.get('MVBOOT_SECRET_KEY', 'mvboot-local-key-not-for-deployment')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'tensorlinalg.apps.TensorlinalgConfig',
    'regression.apps.RegressionConfig',
    'bootstrap.apps.BootstrapConfig',
    'asymptotics.apps.AsymptoticsConfig',
    'mallows.apps.MallowsConfig',
    'simulate.apps.SimulateConfig',
    'cli.apps.CliConfig',
]

MIDDLEWARE = []

# No models live in this project; the dummy backend is never touched.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Inference configuration

MVBOOT = {
    # a string from the environment; core.conf.thread_count parses it
    'THREADS': os.environ.get('MVBOOT_THREADS') or os.cpu_count() or 1,
    'SPD_RELATIVE_TOLERANCE': 1e-10,
    'DEFAULT_ALPHA': 0.05,
    'MAX_REDRAWS': 100,
    'REPLICATES_PER_CASE': 4,  # B = 4n
    'EXPERIMENT_CONFIG': BASE_DIR / 'simulate' / 'defaults.yaml',
    'REPORT_DECIMALS': 3,
    'FINITE_DIFFERENCE_STEP': 1e-6,
    'GRADIENT_TOLERANCE': 1e-4,
}


# Logging Configuration
# Reports go to stdout; log records only ever go to stderr or a file.
LOG_LEVEL = os.environ.get('MVBOOT_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
    },
}

if os.environ.get('MVBOOT_LOG_FILE'):
    LOGGING['handlers']['file'] = {
        'level': 'INFO',
        'class': 'logging.FileHandler',
        'filename': os.environ['MVBOOT_LOG_FILE'],
        'formatter': 'plain',
    }
    LOGGING['root']['handlers'].append('file')
