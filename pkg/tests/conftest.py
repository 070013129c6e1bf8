# pytest configuration for the Monte Carlo acceptance suite
import os
import sys
from pathlib import Path

import django
import pytest

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

# Setup Django
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
django.setup()

from django.conf import settings  # noqa: E402
from django.test import override_settings  # noqa: E402

from simulate.specs import load_experiment_config  # noqa: E402


@pytest.fixture(scope="session")
def experiment_config():
    """The shipped generator configuration"""
    return load_experiment_config()


@pytest.fixture(scope="session")
def cars_csv():
    return str(settings.BASE_DIR / 'data' / 'mtcars.csv')


@pytest.fixture
def threads():
    """Run the wrapped block with a given worker cap"""
    def apply(count):
        return override_settings(MVBOOT={**settings.MVBOOT, 'THREADS': count})
    return apply
