"""
Replicate scheduling and K-walker path builders.

Each replicate draws from its own per-walker streams, so results do not
depend on the number of worker threads; map_replicates returns results in
replicate order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Literal, TypeVar

import numpy as np

from app.rng import RngStream
from app.walks import comb_path_constructed, comb_path_direct, zd_path

logger = logging.getLogger(__name__)

T = TypeVar("T")


def map_replicates(fn: Callable[[int], T], replicates: int, threads: int = 1) -> list[T]:
    """Run fn(0..replicates-1), possibly across threads, keeping replicate order."""
    if replicates < 0:
        raise ValueError(f"replicates must be >= 0, got {replicates}")
    if threads <= 1 or replicates <= 1:
        return [fn(i) for i in range(replicates)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicates)))


def walker_stream(seed: int, experiment: str, walker: int, replicate: int) -> RngStream:
    return RngStream.for_walker(seed, experiment, walker, replicate)


def ensemble_paths(
    graph: Literal["zd", "comb"],
    K: int,
    n: int,
    seed: int,
    experiment: str,
    replicate: int,
    *,
    d: int = 1,
    engine: Literal["direct", "constructed"] = "constructed",
) -> list[np.ndarray]:
    """
    Full paths of K independent walkers from the origin.

    Z^d paths are (n+1, d); comb paths are (n+1, 2) with columns (x, y).
    Walker i always uses the stream of index i, so ensembles of different
    sizes share their first walkers.
    """
    paths = []
    for walker in range(K):
        rng = walker_stream(seed, experiment, walker, replicate)
        if graph == "zd":
            paths.append(zd_path(d, n, rng))
        elif engine == "direct":
            paths.append(comb_path_direct(n, rng).as_array())
        else:
            paths.append(comb_path_constructed(n, rng).as_array())
    return paths
