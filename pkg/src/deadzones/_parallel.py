"""Worker-count policy and a tiny deterministic chunked map.

DEADZONE_THREADS caps the number of worker threads used for independent
batch work (raster rows, basin probes). Results are assembled in input
order, so parallel and serial runs produce identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    env = os.environ.get("DEADZONE_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return max(1, os.cpu_count() or 1)


def run_chunked(fn, chunks, workers: int) -> list:
    """Apply fn to each chunk, in order, with at most `workers` threads."""
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))
