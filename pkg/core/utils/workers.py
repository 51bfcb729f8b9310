import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)


def worker_count():
    """Thread count for grid evaluation, from the ZF_WORKERS setting."""
    return max(1, int(getattr(settings, 'ZF_WORKERS', 1)))


def map_chunks(function, values, workers=None):
    """Apply a vectorized `function` to `values` in contiguous chunks.

    The chunks are concatenated back in order, so the result does not depend
    on the number of threads.
    """
    values = np.asarray(values)
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or values.size < 2 * workers:
        return function(values)
    chunks = np.array_split(values, workers)
    logger.debug('avaliando %d pontos em %d threads', values.size, workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(function, chunks))
    return np.concatenate(results)
