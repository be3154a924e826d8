"""
Distances, ensemble snapshots and collision detection.
"""

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Literal, Sequence

import numpy as np

from app.errors import DistanceOverflowError, InvalidDimensionError
from app.walks import CombVertex, ZdPoint

MetricName = Literal["euclidean", "comb"]
CollisionMode = Literal["pairwise", "full"]


def comb_graph_distance(u: CombVertex | Sequence[int], v: CombVertex | Sequence[int]) -> int:
    """
    Shortest-path distance on the comb.

    Same tooth: |y1 - y2|. Different teeth: walk down to the backbone,
    across, and up: |y1| + |x1 - x2| + |y2|.
    """
    x1, y1 = u
    x2, y2 = v
    if x1 == x2:
        return abs(y1 - y2)
    return abs(y1) + abs(x1 - x2) + abs(y2)


def comb_distance_array(
    x1: np.ndarray, y1: np.ndarray, x2: np.ndarray, y2: np.ndarray
) -> np.ndarray:
    """Vectorized comb_graph_distance over aligned coordinate arrays."""
    same_tooth = x1 == x2
    return np.where(
        same_tooth,
        np.abs(y1 - y2),
        np.abs(y1) + np.abs(x1 - x2) + np.abs(y2),
    )


def comb_bfs_distances(source: CombVertex, radius_cap: int) -> dict[CombVertex, int]:
    """Breadth-first distances from source to every vertex within radius_cap."""
    source = CombVertex(*source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        vertex = queue.popleft()
        if dist[vertex] == radius_cap:
            continue
        for nb in vertex.neighbors():
            if nb not in dist:
                dist[nb] = dist[vertex] + 1
                queue.append(nb)
    return dist


def comb_graph_distance_bfs(u: CombVertex, v: CombVertex, radius_cap: int) -> int:
    """BFS oracle for comb_graph_distance; gives up beyond radius_cap."""
    target = CombVertex(*v)
    dist = comb_bfs_distances(u, radius_cap)
    if target not in dist:
        raise DistanceOverflowError(f"{target} is farther than {radius_cap} from {tuple(u)}")
    return dist[target]


def euclidean_distance(p: ZdPoint | Sequence[int], q: ZdPoint | Sequence[int]) -> float:
    """Euclidean distance between two points of Z^d."""
    a = np.asarray(p.coords if isinstance(p, ZdPoint) else p, dtype=np.float64)
    b = np.asarray(q.coords if isinstance(q, ZdPoint) else q, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidDimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


@dataclass(frozen=True)
class EnsembleSnapshot:
    """States of all K walkers at one common time."""

    time: int
    states: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.states)


def _resolve_metric(metric: MetricName | Callable) -> Callable:
    if callable(metric):
        return metric
    if metric == "euclidean":
        return euclidean_distance
    if metric == "comb":
        return comb_graph_distance
    raise ValueError(f"unknown metric: {metric}")


def max_pairwise_distance(
    snapshot: EnsembleSnapshot, metric: MetricName | Callable = "euclidean"
) -> float:
    """D_K: the largest distance between any two walkers of the snapshot."""
    if snapshot.size < 2:
        raise ValueError(f"need at least 2 walkers, got {snapshot.size}")
    dist = _resolve_metric(metric)
    return max(dist(a, b) for a, b in combinations(snapshot.states, 2))


def max_pairwise_distance_paths(paths: Sequence[np.ndarray], metric: MetricName) -> np.ndarray:
    """
    D_K at every time for aligned paths.

    Each path is an (n+1, dim) integer array; comb paths have columns (x, y).
    """
    if len(paths) < 2:
        raise ValueError(f"need at least 2 walkers, got {len(paths)}")
    if metric == "euclidean" and paths[0].shape[1] == 1:
        stacked = np.stack([p[:, 0] for p in paths])
        return (stacked.max(axis=0) - stacked.min(axis=0)).astype(np.float64)

    best = np.zeros(len(paths[0]), dtype=np.float64)
    for a, b in combinations(paths, 2):
        if metric == "comb":
            d = comb_distance_array(a[:, 0], a[:, 1], b[:, 0], b[:, 1])
        elif metric == "euclidean":
            d = np.sqrt(((a - b) ** 2).sum(axis=1))
        else:
            raise ValueError(f"unknown metric: {metric}")
        np.maximum(best, d, out=best)
    return best


@dataclass(frozen=True)
class CollisionEvent:
    time: int
    kind: CollisionMode
    walkers: tuple[int, ...]
    location: tuple[int, ...]


def detect_collisions(
    snapshots: Iterable[EnsembleSnapshot], mode: CollisionMode = "pairwise"
) -> Iterator[CollisionEvent]:
    """
    Yield collision events from a stream of synchronized snapshots.

    pairwise: one event per coinciding pair. full: one event when all
    walkers share a vertex.
    """
    if mode not in ("pairwise", "full"):
        raise ValueError(f"unknown collision mode: {mode}")
    for snap in snapshots:
        if mode == "full":
            if snap.size >= 2 and all(s == snap.states[0] for s in snap.states):
                yield CollisionEvent(snap.time, "full", tuple(range(snap.size)), snap.states[0])
            continue
        for i, j in combinations(range(snap.size), 2):
            if snap.states[i] == snap.states[j]:
                yield CollisionEvent(snap.time, "pairwise", (i, j), snap.states[i])


def collision_indicators(paths: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """
    Per-time collision counts for aligned paths.

    Returns (pairwise, full): the number of coinciding pairs at each time
    and whether all walkers coincide.
    """
    pairwise = np.zeros(len(paths[0]), dtype=np.int64)
    for a, b in combinations(paths, 2):
        pairwise += (a == b).all(axis=1)
    first = paths[0]
    full = np.ones(len(first), dtype=bool)
    for other in paths[1:]:
        full &= (other == first).all(axis=1)
    return pairwise, full


def count_by_checkpoint(events: Iterable[CollisionEvent], checkpoints: Sequence[int]) -> list[int]:
    """Cumulative event counts at each checkpoint time."""
    times = np.sort(np.fromiter((e.time for e in events), dtype=np.int64))
    return [int(np.searchsorted(times, c, side="right")) for c in checkpoints]


def expected_pairwise_collisions(d: int, n: int) -> float:
    """
    Expected number of times j in [1, n] two independent walks on Z^d meet.

    For d = 1 this is sum_j C(2j, j) 4^-j; for d = 2 each term is squared
    (the rotated walk factors into two independent one-dimensional walks).
    """
    if d not in (1, 2):
        raise InvalidDimensionError(f"closed form available for d in (1, 2), got {d}")
    if n < 1:
        return 0.0
    j = np.arange(1, n + 1, dtype=np.float64)
    terms = np.cumprod((2 * j - 1) / (2 * j))
    if d == 2:
        terms = terms**2
    return float(np.sum(terms))
