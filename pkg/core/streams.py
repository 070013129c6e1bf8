"""
Seeded stream splitting and the replicate worker pool.

Every random draw in the project comes from a generator built by
``child_generator(seed, *key)``: a PCG64 stream seeded with
``SeedSequence(seed, spawn_key=key)``. Replicate ``b`` of a bootstrap run
uses key ``(b,)``; a pairs-bootstrap redraw attempt ``a`` uses ``(b, a)``.
The stream a replicate sees is therefore fixed by (seed, key) alone, and
the pool below may cut the replicate range into any number of chunks
without changing a single bit of the merged result.
"""
import logging

import numpy as np
from joblib import Parallel, delayed

from .conf import thread_count
from .exceptions import InvalidConfiguration

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


def validate_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidConfiguration(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= MAX_SEED:
        raise InvalidConfiguration(f"seed must lie in [0, 2**64), got {seed}")
    return int(seed)


def child_generator(seed, *key):
    sequence = np.random.SeedSequence(validate_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def derive_seed(seed, *key):
    """A 64-bit seed for a sub-experiment, e.g. one dataset per sample size."""
    sequence = np.random.SeedSequence(validate_seed(seed), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def chunk_bounds(count, threads):
    if threads <= 1 or count <= 1:
        return [(0, count)]
    size = -(-count // (threads * 4))
    return [(start, min(start + size, count)) for start in range(0, count, size)]


def run_chunked(worker, count, threads=None):
    """
    Call ``worker(start, stop)`` over contiguous slices of ``range(count)``.

    Returns the per-chunk results in slice order, so concatenating them
    restores replicate order regardless of the worker count.
    """
    threads = thread_count(threads)
    bounds = chunk_bounds(count, threads)
    if len(bounds) == 1:
        return [worker(*bounds[0])]
    logger.debug(f"Running {count} items in {len(bounds)} chunks on {threads} threads")
    return Parallel(n_jobs=min(threads, len(bounds)), prefer='threads')(
        delayed(worker)(start, stop) for start, stop in bounds
    )
