"""Fixed-size segment partitioning and order-preserving parallel execution.

Every range computation in the package walks windows in segments of a
fixed size, so that results never depend on how many worker threads were
used: workers may run concurrently, but partial results are always
combined in segment order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

DEFAULT_SEGMENT_SIZE = 1 << 20


def iter_segments(start: int, length: int, size: int = DEFAULT_SEGMENT_SIZE):
    """Yield (lo, seg_len) chunks covering [start, start + length)."""
    if size < 1:
        raise ValueError("segment size must be >= 1")
    done = 0
    while done < length:
        seg = min(size, length - done)
        yield start + done, seg
        done += seg


def run_ordered(fn, items, threads: int = 1) -> list:
    """Map fn over items, returning results in item order.

    Thread count never changes the returned list, only the wall time.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
