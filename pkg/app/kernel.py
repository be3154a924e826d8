"""
Exact n-step transition kernel of the comb walk.

The walk only moves horizontally while on the backbone, so after n steps
the horizontal coordinate is a simple random walk run for H_n steps,
independent of everything else given H_n. The dynamic program therefore
tracks the joint law of (H_n, C2(n)) and mixes in the binomial law of
S1(H_n) only when a table is read.

Entries below FLUSH_THRESHOLD are dropped after every step so the window
stays bounded for large n; the dropped mass stays far below 1e-12.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy.stats import binom

from app.errors import BudgetGuardError
from app.settings import get_dp_guard
from app.walks import CombVertex

logger = logging.getLogger(__name__)

FLUSH_THRESHOLD = 1e-30

# Rational arithmetic grows quickly; beyond this use the float program
EXACT_MAX_STEPS = 32


def _binomial_column(h: np.ndarray, dx: int) -> np.ndarray:
    """P(S1(h) = dx) for each h, zero when parities disagree."""
    same_parity = (h + dx) % 2 == 0
    k = (h + dx) // 2
    return np.where(same_parity, binom.pmf(k, h, 0.5), 0.0)


@dataclass
class KernelTable:
    """
    Distribution of C(n) for a comb walk started at `start`.

    joint[i, j] = P(H_n = h_lo + i, C2(n) = y_lo + j).
    """

    start: CombVertex
    steps: int
    joint: np.ndarray
    h_lo: int
    y_lo: int

    @property
    def h_values(self) -> np.ndarray:
        return np.arange(self.h_lo, self.h_lo + self.joint.shape[0])

    @property
    def y_values(self) -> np.ndarray:
        return np.arange(self.y_lo, self.y_lo + self.joint.shape[1])

    def shifted(self, x0: int) -> "KernelTable":
        """Same table for a start on another tooth (x-translation)."""
        return KernelTable(CombVertex(x0, self.start.y), self.steps, self.joint, self.h_lo, self.y_lo)

    def prob(self, v: CombVertex | tuple[int, int]) -> float:
        """p(start, v, n)."""
        x, y = v
        j = y - self.y_lo
        if not 0 <= j < self.joint.shape[1]:
            return 0.0
        weights = _binomial_column(self.h_values, x - self.start.x)
        return float(np.dot(weights, self.joint[:, j]))

    def row(self, x: int) -> np.ndarray:
        """p(start, (x, y), n) for every y in the window."""
        weights = _binomial_column(self.h_values, x - self.start.x)
        return weights @ self.joint

    def backbone_mass(self) -> float:
        """P(C2(n) = 0)."""
        j = -self.y_lo
        if not 0 <= j < self.joint.shape[1]:
            return 0.0
        return float(np.sum(self.joint[:, j]))

    def total_mass(self) -> float:
        return float(np.sum(self.joint))

    @property
    def x_lo(self) -> int:
        return self.start.x - int(self.h_values[-1])

    @cached_property
    def probs(self) -> np.ndarray:
        """Dense (x, y) window; probs[i, j] is vertex (x_lo + i, y_lo + j)."""
        h = self.h_values
        h_max = int(h[-1])
        dx = np.arange(-h_max, h_max + 1)
        same_parity = (h[:, None] + dx[None, :]) % 2 == 0
        weights = np.where(same_parity, binom.pmf((h[:, None] + dx[None, :]) // 2, h[:, None], 0.5), 0.0)
        dense = weights.T @ self.joint
        dense[dense < FLUSH_THRESHOLD] = 0.0
        return dense

    def items(self) -> Iterator[tuple[CombVertex, float]]:
        """Nonzero entries sorted by (x, y)."""
        dense = self.probs
        for i, j in zip(*np.nonzero(dense)):
            yield CombVertex(self.x_lo + int(i), self.y_lo + int(j)), float(dense[i, j])

    def as_dict(self) -> dict[CombVertex, float]:
        return dict(self.items())


def _advance(joint: np.ndarray, y_lo: int) -> tuple[np.ndarray, int]:
    """One step of the (H, C2) chain; the window grows by one row and two columns."""
    nh, ny = joint.shape
    zero_col = -y_lo
    out = np.zeros((nh + 1, ny + 2))

    vertical = 0.5 * joint
    vertical[:, zero_col] *= 0.5  # backbone: each tooth direction has 1/4
    out[:nh, 2:] += vertical  # y -> y + 1
    out[:nh, :ny] += vertical  # y -> y - 1
    out[1:, zero_col + 1] += 0.5 * joint[:, zero_col]  # backbone move, h -> h + 1

    return out, y_lo - 1


def _trim(joint: np.ndarray, h_lo: int, y_lo: int) -> tuple[np.ndarray, int, int]:
    joint[joint < FLUSH_THRESHOLD] = 0.0
    rows = np.flatnonzero(joint.any(axis=1))
    cols = np.flatnonzero(joint.any(axis=0))
    zero_col = -y_lo
    c0 = min(int(cols[0]), zero_col)
    c1 = max(int(cols[-1]), zero_col) + 1
    r0, r1 = int(rows[0]), int(rows[-1]) + 1
    return joint[r0:r1, c0:c1], h_lo + r0, y_lo + c0


def iter_kernel_tables(start: CombVertex, n_max: int) -> Iterator[KernelTable]:
    """Yield the kernel tables for n = 0, 1, ..., n_max in one sweep."""
    start = CombVertex(*start)
    y_lo = min(0, start.y)
    joint = np.zeros((1, abs(start.y) + 1))
    joint[0, start.y - y_lo] = 1.0
    h_lo = 0

    yield KernelTable(start, 0, joint, h_lo, y_lo)
    for n in range(1, n_max + 1):
        joint, y_lo = _advance(joint, y_lo)
        joint, h_lo, y_lo = _trim(joint, h_lo, y_lo)
        yield KernelTable(start, n, joint, h_lo, y_lo)


def comb_kernel_dp(start: CombVertex, n: int, *, guard: int | None = None) -> KernelTable:
    """
    Exact n-step distribution from `start` (floating point).

    Args:
        start: Starting vertex
        n: Number of steps
        guard: Largest n accepted; defaults to COMBWALK_DP_GUARD

    Returns:
        KernelTable for C(n)

    Raises:
        BudgetGuardError: If n exceeds the guard
    """
    if n < 0:
        raise ValueError(f"number of steps must be >= 0, got {n}")
    limit = get_dp_guard() if guard is None else guard
    if n > limit:
        raise BudgetGuardError(f"kernel program for n={n} exceeds the guard of {limit} steps")

    logger.debug(f"Kernel sweep from {tuple(start)} for {n} steps")
    table = None
    for table in iter_kernel_tables(start, n):
        pass
    return table


def comb_kernel_dp_exact(start: CombVertex, n: int) -> dict[CombVertex, Fraction]:
    """Exact rational n-step distribution, iterating the one-step kernel."""
    if n < 0:
        raise ValueError(f"number of steps must be >= 0, got {n}")
    if n > EXACT_MAX_STEPS:
        raise BudgetGuardError(f"rational kernel limited to {EXACT_MAX_STEPS} steps, got {n}")

    dist: dict[CombVertex, Fraction] = {CombVertex(*start): Fraction(1)}
    for _ in range(n):
        nxt: dict[CombVertex, Fraction] = defaultdict(Fraction)
        for v, p in dist.items():
            share = p / v.degree
            for nb in v.neighbors():
                nxt[nb] += share
        dist = dict(nxt)
    return dict(sorted(dist.items()))


def write_golden(entries: dict[CombVertex, float], path: Path) -> None:
    """Write `x y prob` lines sorted by (x, y)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for v in sorted(entries):
            p = float(entries[v])
            if p != 0.0:
                f.write(f"{v.x} {v.y} {p:.17g}\n")


def read_golden(path: Path) -> dict[CombVertex, float]:
    """Read a file written by write_golden."""
    entries: dict[CombVertex, float] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            x, y, p = line.split()
            entries[CombVertex(int(x), int(y))] = float(p)
    return entries
