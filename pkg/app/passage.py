"""
First-passage laws on Z and limit laws for the ensemble diameter.
"""

import math
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.special import erfc, gammaln, ndtr

from app.rng import RngStream

# Steps simulated per block when sampling hitting times
HITTING_BLOCK = 64

# Longest path length hitting_counts_bruteforce enumerates (2^n paths)
ENUMERATION_MAX_STEPS = 20

# Lower integration limit for the diameter integral (phi is negligible beyond)
INTEGRAL_TAIL = 10.0


def _check_level(r: int) -> None:
    if r < 1:
        raise ValueError(f"level r must be >= 1, got {r}")


def hitting_pmf(r: int, n: int | np.ndarray) -> float | np.ndarray:
    """
    P(beta(r) = n) = (r/n) C(n, (n+r)/2) 2^-n for the first hit of level r.

    Zero when n < r or n + r is odd. Evaluated in log space.
    """
    _check_level(r)
    n_arr = np.asarray(n, dtype=np.int64)
    valid = (n_arr >= r) & ((n_arr + r) % 2 == 0)
    safe = np.where(valid, n_arr, r).astype(np.float64)
    log_p = (
        math.log(r)
        - np.log(safe)
        + gammaln(safe + 1)
        - gammaln((safe + r) / 2 + 1)
        - gammaln((safe - r) / 2 + 1)
        - safe * math.log(2.0)
    )
    result = np.where(valid, np.exp(log_p), 0.0)
    return float(result) if result.ndim == 0 else result


def hitting_pmf_exact(r: int, n: int) -> Fraction:
    """Rational version of hitting_pmf."""
    _check_level(r)
    if n < r or (n + r) % 2:
        return Fraction(0)
    return Fraction(r, n) * math.comb(n, (n + r) // 2) / 2**n


def hitting_counts_bruteforce(r: int, n_max: int) -> list[int]:
    """
    Number of +-1 paths of length n_max whose first visit to r is at step n.

    Index n of the result holds that count; divide by 2^n_max for P(beta = n).
    """
    _check_level(r)
    if n_max > ENUMERATION_MAX_STEPS:
        raise ValueError(f"enumeration limited to {ENUMERATION_MAX_STEPS} steps, got {n_max}")
    codes = np.arange(2**n_max, dtype=np.int32)
    bits = ((codes[:, None] >> np.arange(n_max, dtype=np.int32)) & 1).astype(np.int8)
    paths = np.cumsum(2 * bits - 1, axis=1, dtype=np.int8)
    reached = paths >= r
    hit = reached.any(axis=1)
    first = np.argmax(reached, axis=1)[hit] + 1
    return np.bincount(first, minlength=n_max + 1).tolist()


def sample_hitting_times(r: int, rng: RngStream, size: int, cap: int) -> np.ndarray:
    """
    Simulate first hitting times of level r for `size` walks.

    Walks that have not hit by `cap` steps are reported as -1.
    """
    _check_level(r)
    result = np.full(size, -1, dtype=np.int64)
    position = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    elapsed = 0
    while active.size and elapsed < cap:
        block = min(HITTING_BLOCK, cap - elapsed)
        steps = rng.signs(active.size * block).reshape(active.size, block)
        paths = position[active, None] + np.cumsum(steps, axis=1)
        reached = paths >= r
        hit = reached.any(axis=1)
        first = np.argmax(reached, axis=1)
        result[active[hit]] = elapsed + first[hit] + 1
        position[active] = paths[:, -1]
        active = active[~hit]
        elapsed += block
    return result


def hitting_limit_cdf(u: float) -> float:
    """
    lim P(beta(r) <= u r^2) = sqrt(2/pi) int_{1/sqrt(u)}^inf e^(-s^2/2) ds.

    Equals erfc(1 / sqrt(2u)).
    """
    if u <= 0:
        raise ValueError(f"u must be positive, got {u}")
    if math.isinf(u):
        return 1.0
    return float(erfc(1.0 / math.sqrt(2.0 * u)))


def dk_limit_cdf(z: float, K: int, *, tol: float = 1e-10) -> float:
    """
    Limit CDF of D_K(n)/sqrt(n) on Z:
    int K (Phi(x) - Phi(x - z))^(K-1) phi(x) dx.
    """
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    if z == 0:
        return 0.0

    def integrand(x: float) -> float:
        spread = ndtr(x) - ndtr(x - z)
        return K * spread ** (K - 1) * math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    value, _ = integrate.quad(
        integrand, -INTEGRAL_TAIL, z + INTEGRAL_TAIL, epsabs=tol, epsrel=tol, limit=200
    )
    return min(max(value, 0.0), 1.0)


def dk_pair_cdf(z: float) -> float:
    """Closed form of dk_limit_cdf for K = 2: 2 Phi(z / sqrt(2)) - 1."""
    if z < 0:
        raise ValueError(f"z must be >= 0, got {z}")
    return float(2.0 * ndtr(z / math.sqrt(2.0)) - 1.0)


def gaussian_diameter_samples(K: int, d: int, size: int, rng: RngStream) -> np.ndarray:
    """
    Max pairwise distance of K independent N(0, I/d) points in R^d.

    This is the limit law of D_K(n)/sqrt(n) for walks on Z^d.
    """
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    points = rng.generator.standard_normal((size, K, d)) / math.sqrt(d)
    best = np.zeros(size)
    for i in range(K):
        for j in range(i + 1, K):
            np.maximum(best, np.linalg.norm(points[:, i] - points[:, j], axis=1), out=best)
    return best


def dk_limit_cdf_mc(z: float, K: int, d: int, size: int, rng: RngStream) -> tuple[float, float]:
    """Monte Carlo estimate of the limit CDF in any dimension, with its standard error."""
    samples = gaussian_diameter_samples(K, d, size, rng)
    estimate = float(np.mean(samples <= z))
    return estimate, math.sqrt(estimate * (1.0 - estimate) / size)
