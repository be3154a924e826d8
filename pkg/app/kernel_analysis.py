"""
Checks and asymptotic predictions built on exact kernel tables.

Covers reversibility against the degree measure, the backbone return
probability, the vertical profile along the starting tooth, the large
deviation shape along a tooth, and the fixed-vertex local limit.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from app.kernel import iter_kernel_tables
from app.kernel_store import get_kernel_store
from app.metrics import comb_graph_distance
from app.walks import CombVertex

GAMMA_QUARTER = float(gamma(0.25))

# Limit of p((0,0),(0,0),2n) * (2n)^(3/4)
BACKBONE_LOCAL_CONSTANT = 2 ** 1.25 / GAMMA_QUARTER


def _vertex(v: CombVertex | tuple[int, int]) -> CombVertex:
    return CombVertex(int(v[0]), int(v[1]))


def reversibility_defect(u: CombVertex, v: CombVertex, n: int) -> float:
    """|deg(u) p(u,v,n) - deg(v) p(v,u,n)|, zero by reversibility."""
    u, v = _vertex(u), _vertex(v)
    if (n + comb_graph_distance(u, v)) % 2:
        return 0.0
    store = get_kernel_store()
    return abs(u.degree * store.prob(u, v, n) - v.degree * store.prob(v, u, n))


def chapman_kolmogorov_defect(u: CombVertex, v: CombVertex, m: int, n: int) -> float:
    """|p(u,v,m+n) - sum_w p(u,w,m) p(w,v,n)|."""
    store = get_kernel_store()
    first = store.table(_vertex(u), m)
    total = math.fsum(p * store.prob(w, v, n) for w, p in first.items())
    return abs(store.prob(u, v, m + n) - total)


def backbone_return_prob(n: int) -> float:
    """P(C2(n) = 0) for the walk started at the origin."""
    if n < 0:
        raise ValueError(f"number of steps must be >= 0, got {n}")
    return get_kernel_store().table(CombVertex(0, 0), n).backbone_mass()


def backbone_return_asymptotic(n: int) -> float:
    """Leading order sqrt(2 / (pi n)) of backbone_return_prob."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(2.0 / (math.pi * n))


@dataclass
class VerticalProfile:
    """n^(3/4) p((0,0),(0,k),n) for k = 0..k_max."""

    steps: int
    values: np.ndarray
    sup_value: float
    argmax: int
    nonincreasing: bool

    @property
    def constant(self) -> float:
        return self.sup_value


def vertical_profile_bound(n: int, k_max: int) -> VerticalProfile:
    """
    Scaled kernel along the starting tooth.

    Values of the wrong parity are zero; monotonicity is reported over the
    nonzero entries and not enforced.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if k_max < 0 or k_max > n**0.45:
        raise ValueError(f"k_max must lie in [0, n^0.45] = [0, {n**0.45:.2f}], got {k_max}")

    table = get_kernel_store().table(CombVertex(0, 0), n)
    scale = n**0.75
    values = np.array([scale * table.prob((0, k)) for k in range(k_max + 1)])
    nonzero = values[(np.arange(k_max + 1) + n) % 2 == 0]
    argmax = int(np.argmax(values))
    return VerticalProfile(
        steps=n,
        values=values,
        sup_value=float(values[argmax]),
        argmax=argmax,
        nonincreasing=bool(np.all(np.diff(nonzero) <= 0)),
    )


@dataclass
class JointProfile:
    steps: int
    max_value: float
    at: CombVertex


def joint_profile_bound(n: int, eps: float) -> JointProfile:
    """max over |y| <= n^(1/2 - eps) of n^(3/4) p((0,0),(x,y),n)."""
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    table = get_kernel_store().table(CombVertex(0, 0), n)
    dense = table.probs
    y = table.y_values
    allowed = np.abs(y) <= n ** (0.5 - eps)
    masked = np.where(allowed[None, :], dense, 0.0)
    i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
    return JointProfile(
        steps=n,
        max_value=float(masked[i, j] * n**0.75),
        at=CombVertex(table.x_lo + int(i), int(y[j])),
    )


def tooth_exponent(kappa: float | np.ndarray) -> float | np.ndarray:
    """(kappa - 1) log(1 - kappa) - (kappa + 1) log(1 + kappa); decreasing on [0, 1)."""
    kappa = np.asarray(kappa, dtype=np.float64)
    result = (kappa - 1) * np.log1p(-kappa) - (kappa + 1) * np.log1p(kappa)
    return float(result) if result.ndim == 0 else result


def tooth_kernel_prediction(n: int, k: int) -> float:
    """
    sqrt(2) exp(n phi(k/n)) / (Gamma(1/4) n^(3/4)).

    Predicts p((0, 2k), (0, 0), 2n) for 0 <= k < n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < n, got k={k}, n={n}")
    return math.sqrt(2.0) * math.exp(n * tooth_exponent(k / n)) / (GAMMA_QUARTER * n**0.75)


def tooth_kernel_ratio(steps: int, r: int) -> float:
    """p((0, r), (0, 0), steps) from the table over its prediction; steps and r even."""
    if steps % 2 or r % 2:
        raise ValueError(f"steps and r must both be even, got steps={steps}, r={r}")
    exact = get_kernel_store().prob((0, r), (0, 0), steps)
    return exact / tooth_kernel_prediction(steps // 2, r // 2)


def fixed_vertex_asymptotic(u: CombVertex, v: CombVertex, n: int) -> float:
    """2^(-3/4) deg(v) / (Gamma(1/4) n^(3/4)) on the right parity, else 0."""
    u, v = _vertex(u), _vertex(v)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if (n + comb_graph_distance(u, v)) % 2:
        return 0.0
    return 2**-0.75 * v.degree / (GAMMA_QUARTER * n**0.75)


def fixed_vertex_ratio(u: CombVertex, v: CombVertex, n: int) -> float:
    """Exact kernel over fixed_vertex_asymptotic."""
    predicted = fixed_vertex_asymptotic(u, v, n)
    if predicted == 0.0:
        raise ValueError(f"p({tuple(u)}, {tuple(v)}, {n}) vanishes by parity")
    return get_kernel_store().prob(u, v, n) / predicted


def kernel_partial_sum(v: CombVertex, z: float, n_max: int) -> float:
    """sum_{n <= n_max} p((0,0), v, n) z^n, from one kernel sweep."""
    terms = [
        table.prob(v) * z**table.steps
        for table in iter_kernel_tables(CombVertex(0, 0), n_max)
    ]
    return math.fsum(terms)
