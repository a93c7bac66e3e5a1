"""Thread-count resolution and an order-preserving parallel map.

Results never depend on the thread count: every task derives its own
seed, and outputs are collected in input order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .errors import InvalidParameterError

ENV_THREADS = "SKETCHBENCH_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(requested: int | None) -> int:
    """``requested`` if given, else ``$SKETCHBENCH_THREADS``, else 1."""
    if requested is None:
        env = os.environ.get(ENV_THREADS, "").strip()
        if not env:
            return 1
        try:
            requested = int(env)
        except ValueError as exc:
            raise InvalidParameterError(f"{ENV_THREADS} must be an integer, got {env!r}") from exc
    if requested < 1:
        raise InvalidParameterError(f"thread count must be positive, got {requested}")
    return requested


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
