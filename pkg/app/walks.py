"""
Walk engines for simple random walks on Z^d and on the 2D comb.

Provides:
- Single-step samplers for both lattices
- Full-path simulation on Z^d (vectorized)
- Direct comb simulation from the transition kernel
- Comb simulation built from a backbone walk, a tooth walk and
  geometric holding runs (the two must agree in law)
- Trajectory records with per-checkpoint states and step counters
"""

from dataclasses import dataclass, field
from typing import Iterable, Literal, NamedTuple

import numpy as np

from app.errors import InvalidDimensionError, SparseTrajectoryError
from app.rng import RngStream, sample_geometric_array

Lattice = Literal["zd", "comb"]

# Driver chunk size for lazy extension of the tooth walk
DRIVER_CHUNK = 1024


class CombVertex(NamedTuple):
    """Vertex (x, y) of the comb; y == 0 is the backbone."""

    x: int
    y: int

    @property
    def degree(self) -> int:
        return 4 if self.y == 0 else 2

    def neighbors(self) -> list["CombVertex"]:
        if self.y == 0:
            return [
                CombVertex(self.x + 1, 0),
                CombVertex(self.x - 1, 0),
                CombVertex(self.x, 1),
                CombVertex(self.x, -1),
            ]
        return [CombVertex(self.x, self.y + 1), CombVertex(self.x, self.y - 1)]


class ZdPoint(NamedTuple):
    """Point of Z^d."""

    coords: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def origin(cls, d: int) -> "ZdPoint":
        _check_dimension(d)
        return cls(tuple([0] * d))

    def __add__(self, other: "ZdPoint") -> "ZdPoint":  # type: ignore[override]
        if self.dim != other.dim:
            raise InvalidDimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return ZdPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))


@dataclass
class Trajectory:
    """
    Record of one walk.

    checkpoints holds (time, state) pairs, state being a tuple of ints:
    the coordinates on Z^d, or (x, y) on the comb. path is the full
    (n+1, dim) record and is only kept on request.
    """

    lattice: Lattice
    steps: int
    checkpoints: list[tuple[int, tuple[int, ...]]]
    horizontal_steps: int = 0
    vertical_steps: int = 0
    local_time_zero: int = 0
    max_abs_horizontal: int = 0
    path: np.ndarray | None = None

    @property
    def final_state(self) -> tuple[int, ...]:
        return self.checkpoints[-1][1]

    def state_at(self, t: int) -> tuple[int, ...]:
        """State at time t, from checkpoints or the full path."""
        for time, state in self.checkpoints:
            if time == t:
                return state
        if self.path is not None and 0 <= t <= self.steps:
            return tuple(int(c) for c in self.path[t])
        raise SparseTrajectoryError(f"time {t} is not recorded in this trajectory")


@dataclass
class CombPath:
    """Full comb path plus the pieces it was built from."""

    x: np.ndarray
    y: np.ndarray
    horizontal: np.ndarray
    run_lengths: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    returns: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def steps(self) -> int:
        return len(self.x) - 1

    @property
    def horizontal_steps(self) -> int:
        return int(self.horizontal.sum())

    @property
    def vertical_steps(self) -> int:
        return self.steps - self.horizontal_steps

    def as_array(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])


class ReturnClock:
    """
    Lazily extended tooth driver with its return times and holding runs.

    The driver S2 is a simple walk on Z; returns are the positive times it
    sits at 0. Holding runs G_1, G_2, ... are geometric with
    P(G = k) = 2^(-k-1) and are drawn from a separate stream.
    """

    def __init__(self, driver_rng: RngStream, run_rng: RngStream, chunk: int = DRIVER_CHUNK) -> None:
        self._driver_rng = driver_rng
        self._run_rng = run_rng
        self._chunk = chunk
        self._driver = np.zeros(1, dtype=np.int64)
        self._returns: list[int] = []
        self._runs = np.zeros(0, dtype=np.int64)

    @property
    def driver_length(self) -> int:
        return len(self._driver) - 1

    def _extend(self, target: int) -> None:
        while self.driver_length < target:
            size = max(self._chunk, target - self.driver_length)
            start = self.driver_length
            block = self._driver[-1] + np.cumsum(self._driver_rng.signs(size))
            self._driver = np.concatenate([self._driver, block])
            zeros = np.flatnonzero(block == 0) + start + 1
            self._returns.extend(int(t) for t in zeros)

    def driver(self, length: int) -> np.ndarray:
        """S2(0..length)."""
        self._extend(length)
        return self._driver[: length + 1]

    def returns_until(self, t: int) -> np.ndarray:
        """Return times of the driver that are <= t."""
        self._extend(t)
        returns = np.asarray(self._returns, dtype=np.int64)
        return returns[returns <= t]

    def return_time(self, count: int) -> int:
        """Time of the count-th return to 0."""
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        while len(self._returns) < count:
            self._extend(self.driver_length + self._chunk)
        return self._returns[count - 1]

    def run_lengths(self, count: int) -> np.ndarray:
        """G_1..G_count."""
        missing = count - len(self._runs)
        if missing > 0:
            self._runs = np.concatenate([self._runs, sample_geometric_array(self._run_rng, missing)])
        return self._runs[:count]


def _check_dimension(d: int) -> None:
    if d < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d}")


def _check_steps(n: int) -> None:
    if n < 0:
        raise ValueError(f"number of steps must be >= 0, got {n}")


def checkpoint_times(n: int, extra: Iterable[int] = ()) -> list[int]:
    """0, every power of two up to n, n itself and any extra times <= n."""
    _check_steps(n)
    times = {0, n}
    power = 1
    while power <= n:
        times.add(power)
        power *= 2
    times.update(t for t in extra if 0 <= t <= n)
    return sorted(times)


# --- Z^d ---------------------------------------------------------------------


def _outcome_to_increment(outcome: np.ndarray, d: int) -> np.ndarray:
    # outcome 2i -> +e_i, outcome 2i+1 -> -e_i
    outcome = np.asarray(outcome)
    increments = np.zeros(outcome.shape + (d,), dtype=np.int64)
    axis = outcome // 2
    sign = 1 - 2 * (outcome % 2)
    np.put_along_axis(increments, axis[..., None], sign[..., None], axis=-1)
    return increments


def zd_step(d: int, rng: RngStream) -> ZdPoint:
    """One uniform nearest-neighbour increment +-e_i."""
    _check_dimension(d)
    increment = _outcome_to_increment(np.asarray(rng.integers(2 * d)), d)
    return ZdPoint(tuple(int(c) for c in increment))


def zd_path(d: int, n: int, rng: RngStream) -> np.ndarray:
    """(n+1, d) array of positions of a simple random walk from the origin."""
    _check_dimension(d)
    _check_steps(n)
    path = np.zeros((n + 1, d), dtype=np.int64)
    if n:
        increments = _outcome_to_increment(rng.integers(2 * d, size=n), d)
        np.cumsum(increments, axis=0, out=path[1:])
    return path


def sample_zd_endpoint(d: int, n: int, rng: RngStream) -> np.ndarray:
    """S(n) drawn directly from its multinomial law, without the path."""
    _check_dimension(d)
    _check_steps(n)
    if d == 1:
        return np.array([2 * int(rng.generator.binomial(n, 0.5)) - n], dtype=np.int64)
    counts = rng.generator.multinomial(n, [1.0 / (2 * d)] * (2 * d))
    return (counts[0::2] - counts[1::2]).astype(np.int64)


def simulate_zd(
    d: int,
    n: int,
    rng: RngStream,
    *,
    extra_times: Iterable[int] = (),
    keep_path: bool = False,
) -> Trajectory:
    """
    Simulate n steps of a simple random walk on Z^d from the origin.

    Args:
        d: Dimension (>= 1)
        n: Number of steps (>= 0)
        rng: Walker stream
        extra_times: Additional checkpoint times besides the dyadic ones
        keep_path: Keep the full (n+1, d) path on the trajectory

    Returns:
        Trajectory with checkpoint states, returns to the origin and the
        largest |first coordinate|
    """
    path = zd_path(d, n, rng)
    times = checkpoint_times(n, extra_times)
    at_origin = ~path[1:].any(axis=1)
    return Trajectory(
        lattice="zd",
        steps=n,
        checkpoints=[(t, tuple(int(c) for c in path[t])) for t in times],
        horizontal_steps=n,
        local_time_zero=int(at_origin.sum()),
        max_abs_horizontal=int(np.abs(path[:, 0]).max()),
        path=path if keep_path else None,
    )


def local_time_zero(traj: Trajectory) -> int:
    """Number of times j in [1, n] with S(j) = 0 for a one-dimensional walk."""
    if traj.path is None:
        raise SparseTrajectoryError("local time needs the full path; simulate with keep_path=True")
    if traj.lattice != "zd" or traj.path.shape[1] != 1:
        raise InvalidDimensionError("local time at zero is defined here for walks on Z only")
    return int(np.count_nonzero(traj.path[1:, 0] == 0))


# --- Comb --------------------------------------------------------------------


def _comb_move(x: int, y: int, u: float) -> tuple[int, int]:
    if y != 0:
        return x, y + 1 if u < 0.5 else y - 1
    k = int(u * 4)
    if k == 0:
        return x + 1, y
    if k == 1:
        return x - 1, y
    if k == 2:
        return x, y + 1
    return x, y - 1


def comb_step_direct(v: CombVertex, rng: RngStream) -> CombVertex:
    """One step of the comb walk from v using a single uniform draw."""
    x, y = _comb_move(v.x, v.y, float(rng.uniform()))
    return CombVertex(x, y)


def comb_path_direct(n: int, rng: RngStream, start: CombVertex = CombVertex(0, 0)) -> CombPath:
    """Comb path straight from the transition kernel."""
    _check_steps(n)
    u = rng.uniform(n) if n else np.zeros(0)
    x = np.empty(n + 1, dtype=np.int64)
    y = np.empty(n + 1, dtype=np.int64)
    x[0], y[0] = start
    cx, cy = int(start.x), int(start.y)
    for j in range(n):
        cx, cy = _comb_move(cx, cy, u[j])
        x[j + 1] = cx
        y[j + 1] = cy
    return CombPath(x=x, y=y, horizontal=x[1:] != x[:-1])


def comb_endpoints_direct(n: int, rng: RngStream, size: int) -> tuple[np.ndarray, np.ndarray]:
    """C(n) for `size` independent direct comb walks, stepped in lockstep."""
    _check_steps(n)
    x = np.zeros(size, dtype=np.int64)
    y = np.zeros(size, dtype=np.int64)
    for _ in range(n):
        u = rng.uniform(size)
        on_tooth = y != 0
        vertical_sign = np.where(u < 0.5, 1, -1)
        k = (u * 4).astype(np.int64)
        dx = np.where(on_tooth, 0, np.select([k == 0, k == 1], [1, -1], 0))
        dy = np.where(on_tooth, vertical_sign, np.select([k == 2, k == 3], [1, -1], 0))
        x += dx
        y += dy
    return x, y


def comb_path_constructed(n: int, rng: RngStream) -> CombPath:
    """
    Comb path assembled from independent pieces.

    A backbone walk S1, a tooth driver S2 and geometric runs G_i are drawn
    from three substreams. Runs of G_i horizontal steps alternate with full
    excursions of S2 away from 0; the result is cut at n steps.
    """
    _check_steps(n)
    backbone_rng = rng.substream("backbone")
    clock = ReturnClock(rng.substream("tooth"), rng.substream("runs"))

    driver = clock.driver(n)
    returns = clock.returns_until(n)
    excursions = np.diff(np.concatenate([[0], returns]))
    runs = clock.run_lengths(len(returns) + 1)
    tail = n - (int(returns[-1]) if len(returns) else 0)

    # [G_1, e_1, G_2, e_2, ..., G_m+1, tail]
    lengths = np.empty(2 * len(runs), dtype=np.int64)
    lengths[0::2] = runs
    lengths[1::2] = np.concatenate([excursions, [tail]])
    labels = np.tile([True, False], len(runs))
    horizontal = np.repeat(labels, lengths)[:n]

    h_count = np.concatenate([[0], np.cumsum(horizontal)])
    v_count = np.arange(n + 1) - h_count
    backbone = np.concatenate([[0], np.cumsum(backbone_rng.signs(int(h_count[-1])))])

    return CombPath(
        x=backbone[h_count],
        y=driver[v_count],
        horizontal=horizontal,
        run_lengths=runs,
        returns=returns,
    )


def _comb_trajectory(path: CombPath, extra_times: Iterable[int], keep_path: bool) -> Trajectory:
    n = path.steps
    times = checkpoint_times(n, extra_times)
    vertical_at_zero = (~path.horizontal) & (path.y[1:] == 0)
    return Trajectory(
        lattice="comb",
        steps=n,
        checkpoints=[(t, (int(path.x[t]), int(path.y[t]))) for t in times],
        horizontal_steps=path.horizontal_steps,
        vertical_steps=path.vertical_steps,
        local_time_zero=int(vertical_at_zero.sum()),
        max_abs_horizontal=int(np.abs(path.x).max()),
        path=path.as_array() if keep_path else None,
    )


def simulate_comb_direct(
    n: int,
    rng: RngStream,
    *,
    extra_times: Iterable[int] = (),
    keep_path: bool = False,
) -> Trajectory:
    """Simulate n comb steps from the origin with the direct kernel."""
    return _comb_trajectory(comb_path_direct(n, rng), extra_times, keep_path)


def simulate_comb_constructed(
    n: int,
    rng: RngStream,
    *,
    extra_times: Iterable[int] = (),
    keep_path: bool = False,
) -> Trajectory:
    """Simulate n comb steps from the origin with the constructed walk."""
    return _comb_trajectory(comb_path_constructed(n, rng), extra_times, keep_path)
