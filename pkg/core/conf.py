from django.conf import settings

from .exceptions import InvalidConfiguration


def mvboot_setting(name):
    """Return one entry of the ``MVBOOT`` settings block."""
    try:
        return settings.MVBOOT[name]
    except KeyError:
        raise InvalidConfiguration(f"MVBOOT setting '{name}' is not defined")


def thread_count(override=None):
    """Worker cap for replicate pools; results never depend on it."""
    threads = override if override is not None else mvboot_setting('THREADS')
    try:
        threads = int(str(threads).strip())
    except ValueError:
        raise InvalidConfiguration(f"thread count must be an integer, got {threads!r}")
    return max(1, threads)
