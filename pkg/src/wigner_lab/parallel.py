"""Order-preserving thread map capped by ``WIGNER_LAB_THREADS``."""
import os
from concurrent.futures import ThreadPoolExecutor


def max_workers():
    raw = os.environ.get("WIGNER_LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def map_ordered(fn, items):
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
