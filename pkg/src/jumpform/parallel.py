"""Ordered thread-pool map capped by JUMPFORM_THREADS."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    """Parallelism cap from JUMPFORM_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("JUMPFORM_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    """``[fn(x) for x in items]``, possibly on threads; order is preserved."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))
