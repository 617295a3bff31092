from concurrent.futures import Future, ThreadPoolExecutor
from threading import Lock
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
from loguru import logger

from src.config.config import THREADS

T = TypeVar("T")
R = TypeVar("R")


def pairwise_sum(values: Sequence[float]) -> float:
    """Sum ``values`` with a fixed binary tree.

    The tree only depends on ``len(values)``, so the rounding is identical no matter which
    worker produced which partial.
    """
    items = [float(value) for value in values]
    if not items:
        return 0.0
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def pairwise_sum_array(values: np.ndarray) -> float:
    return pairwise_sum(np.asarray(values, dtype=float).ravel().tolist())


class WorkScheduler:
    """Thread-pool scheduler returning results in submission order.

    - ``threads == 1`` runs everything inline in the calling thread.
    - Chunking is decided by the caller, never by the number of threads.
    """

    def __init__(self, threads: Optional[int] = None):
        self.threads = max(1, int(threads if threads is not None else THREADS))
        self._pool: Optional[ThreadPoolExecutor] = None
        if self.threads > 1:
            self._pool = ThreadPoolExecutor(
                max_workers=self.threads, thread_name_prefix="cfs-lab-worker"
            )
        self._lock = Lock()
        self._pending = 0
        self._closed = False

    def __enter__(self) -> "WorkScheduler":
        return self

    def __exit__(self, *_exc: object) -> None:
        self.shutdown(wait=True)

    def _submit(self, fn: Callable[[T], R], item: T) -> Future:
        with self._lock:
            if self._closed:
                raise RuntimeError("work scheduler is shut down")
            self._pending += 1

        def _done_cb(_fut: Future) -> None:
            with self._lock:
                self._pending -= 1

        fut = self._pool.submit(fn, item)
        fut.add_done_callback(_done_cb)
        return fut

    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply ``fn`` to every item; results come back in input order."""
        items = list(items)
        if self._pool is None:
            if self._closed:
                raise RuntimeError("work scheduler is shut down")
            return [fn(item) for item in items]
        futures = [self._submit(fn, item) for item in items]
        logger.debug("Scheduled {} chunks on {} threads", len(futures), self.threads)
        return [fut.result() for fut in futures]

    def status(self) -> Dict[str, object]:
        with self._lock:
            return {"threads": self.threads, "pending": self._pending, "closed": self._closed}

    def shutdown(self, wait: bool = False) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
        if self._pool is not None:
            self._pool.shutdown(wait=wait, cancel_futures=True)


__all__ = ["WorkScheduler", "pairwise_sum", "pairwise_sum_array"]
