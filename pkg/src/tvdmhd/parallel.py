"""Slab partitioning and the deterministic fork-join execution contract.

Work is split over the outermost (slowest-varying) array axis into contiguous
slabs, one per worker.  Bodies must confine their writes to their slab except
for the staggered neighbour writes of the magnetic update, which are made
race-free by the odd/even pass schedule.  Under that contract every result is
bitwise identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable


@dataclass(frozen=True)
class SlabPartition:
    """Contiguous index ranges over the outermost axis, one per worker."""

    worker_count: int
    ranges: tuple[tuple[int, int], ...]


class SlabError(RuntimeError):
    """A slab body failed; names the failing slab and chains the cause."""

    def __init__(self, slab_index: int, cause: BaseException):
        self.slab_index = slab_index
        super().__init__(f"slab {slab_index} failed: {cause}")


def partition(n3: int, workers: int) -> SlabPartition:
    """Split [0, n3) into `workers` contiguous ranges with sizes differing by <= 1."""
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    if workers > n3:
        raise ValueError(f"more workers than slabs: {workers} workers for {n3} planes")
    base, extra = divmod(n3, workers)
    ranges = []
    lo = 0
    for w in range(workers):
        hi = lo + base + (1 if w < extra else 0)
        ranges.append((lo, hi))
        lo = hi
    return SlabPartition(workers, tuple(ranges))


def parallel_for(part: SlabPartition, body: Callable[[int, int, int], None]) -> None:
    """Run body(slab_index, lo, hi) once per slab; return only after all finish.

    Failures abort the call with a SlabError for the lowest failing slab index,
    independent of scheduling order.
    """
    if part.worker_count == 1:
        for i, (lo, hi) in enumerate(part.ranges):
            try:
                body(i, lo, hi)
            except Exception as exc:
                raise SlabError(i, exc) from exc
        return

    failures: dict[int, BaseException] = {}
    with ThreadPoolExecutor(max_workers=part.worker_count) as pool:
        futures = [
            pool.submit(body, i, lo, hi) for i, (lo, hi) in enumerate(part.ranges)
        ]
        for i, fut in enumerate(futures):
            exc = fut.exception()
            if exc is not None:
                failures[i] = exc
    if failures:
        first = min(failures)
        raise SlabError(first, failures[first]) from failures[first]
