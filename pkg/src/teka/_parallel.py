"""Thread-pool helpers with deterministic, input-ordered results.

The compiled kernels release the GIL, so threads give real speedup for
per-pair dynamic programming.  Results are always collected in input
order, which keeps every aggregate bitwise independent of the worker
count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import InputError

JOBS_ENV = "TEKA_JOBS"


def resolve_jobs(jobs: int | None = None) -> int:
    """Worker count: explicit argument, else $TEKA_JOBS, else cpu count."""
    if jobs is None:
        env = os.environ.get(JOBS_ENV)
        if env is not None:
            try:
                jobs = int(env)
            except ValueError:
                raise InputError(f"{JOBS_ENV} must be an integer, got {env!r}")
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise InputError(f"jobs must be >= 1, got {jobs}")
    return jobs


def map_ordered(fn, items, jobs: int | None = None) -> list:
    """Apply fn to each item, results in input order."""
    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
