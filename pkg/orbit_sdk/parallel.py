from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, Optional, TypeVar

from orbit_sdk.config import worker_count

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> Iterator[R]:
    """Map ``func`` over ``items`` in worker processes, yielding results in input order.

    ``func`` and the items must be picklable when more than one worker is used.
    """
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        yield from map(func, items)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(func, items)
