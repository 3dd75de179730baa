"""Thread-pool helper with ordered, deterministic results."""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count(threads=None):
    """Resolve a worker count; ``None`` reads ``INTERP_THREADS`` (0 = auto)."""
    if threads is None:
        raw = os.environ.get("INTERP_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"INTERP_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def ordered_map(fn, items, threads=None):
    """``[fn(x) for x in items]``, possibly evaluated concurrently.

    Output order always matches input order, so reductions over the
    result are independent of scheduling.
    """
    items = list(items)
    n = min(worker_count(threads), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
