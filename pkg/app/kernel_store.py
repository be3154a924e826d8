"""
Singleton store for computed kernel tables.

Tables are cached per (tooth height of the start, n); a start on another
tooth reuses the same table shifted along the backbone.
"""

import logging
import time
from functools import lru_cache

from app.kernel import KernelTable, comb_kernel_dp
from app.walks import CombVertex

logger = logging.getLogger(__name__)

# Tables kept in memory at once
TABLE_CACHE_SIZE = 64


@lru_cache(maxsize=TABLE_CACHE_SIZE)
def _cached_table(start_y: int, n: int, guard: int | None) -> KernelTable:
    started = time.perf_counter()
    table = comb_kernel_dp(CombVertex(0, start_y), n, guard=guard)
    elapsed = time.perf_counter() - started
    if elapsed > 1.0:
        logger.info(f"Kernel table (0,{start_y}) n={n} built in {elapsed:.1f}s, window {table.joint.shape}")
    return table


class KernelStore:
    """Singleton store for kernel tables."""

    _instance: "KernelStore | None" = None

    def __new__(cls) -> "KernelStore":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self) -> None:
        if self._initialized:
            return
        self._requests = 0
        self._initialized = True

    @property
    def cached_count(self) -> int:
        """Number of tables currently cached."""
        return _cached_table.cache_info().currsize

    @property
    def request_count(self) -> int:
        return self._requests

    def table(self, start: CombVertex | tuple[int, int], n: int, *, guard: int | None = None) -> KernelTable:
        """Kernel table for C(n) started at `start`."""
        self._requests += 1
        x0, y0 = start
        base = _cached_table(int(y0), int(n), guard)
        return base if x0 == 0 else base.shifted(int(x0))

    def prob(self, u: CombVertex | tuple[int, int], v: CombVertex | tuple[int, int], n: int) -> float:
        """p(u, v, n)."""
        return self.table(u, n).prob(v)

    def clear(self) -> None:
        """Drop all cached tables."""
        _cached_table.cache_clear()


def get_kernel_store() -> KernelStore:
    """Get the singleton kernel store."""
    return KernelStore()
