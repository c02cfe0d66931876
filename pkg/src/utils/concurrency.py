"""Deterministic parallel map over independent decomposition work."""
import threading
from multiprocessing.pool import ThreadPool
from typing import Callable, Iterable, List, TypeVar

from src.core.config import settings

T = TypeVar("T")
R = TypeVar("R")

_state = threading.local()


def _run_nested(fn: Callable[[T], R], item: T) -> R:
    _state.inside = True
    try:
        return fn(item)
    finally:
        _state.inside = False


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """map() on up to settings.threads workers; results keep input order.

    Calls made from inside a worker run serially.
    """
    items = list(items)
    workers = min(settings.threads, len(items))
    if workers <= 1 or getattr(_state, "inside", False):
        return [fn(item) for item in items]
    with ThreadPool(workers) as pool:
        return pool.map(lambda item: _run_nested(fn, item), items)
