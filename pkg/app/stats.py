"""
Statistical tests used by the experiments.

All tests return a StatTest whose verdict is a pure function of its
decision value and threshold.
"""

from typing import Callable, Literal, Sequence

import numpy as np
from scipy import stats

from app.errors import StatTestError
from app.models import StatTest

# Minimum expected count per chi-square bin
MIN_EXPECTED = 5.0


def merge_sparse_bins(
    observed: np.ndarray, expected: np.ndarray, min_expected: float = MIN_EXPECTED
) -> tuple[np.ndarray, np.ndarray]:
    """
    Merge adjacent bins until every expected count reaches min_expected.

    A short remainder at the end is folded into the last full bin.
    """
    merged_obs: list[float] = []
    merged_exp: list[float] = []
    acc_obs = acc_exp = 0.0
    for o, e in zip(observed, expected):
        acc_obs += o
        acc_exp += e
        if acc_exp >= min_expected:
            merged_obs.append(acc_obs)
            merged_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if acc_exp > 0 or acc_obs > 0:
        if merged_exp:
            merged_obs[-1] += acc_obs
            merged_exp[-1] += acc_exp
        else:
            merged_obs.append(acc_obs)
            merged_exp.append(acc_exp)
    return np.asarray(merged_obs), np.asarray(merged_exp)


def chi_square_gof(
    observed_counts: Sequence[float],
    expected_probs: Sequence[float],
    threshold: float = 1e-3,
    min_expected: float = MIN_EXPECTED,
) -> StatTest:
    """
    Chi-square goodness of fit; passes when the p-value exceeds threshold.

    Args:
        observed_counts: Counts per bin
        expected_probs: Bin probabilities (renormalized to the observed total)
        threshold: p-value floor
        min_expected: Bins below this expected count are merged

    Raises:
        StatTestError: If there is no data or fewer than two bins remain
    """
    observed = np.asarray(observed_counts, dtype=np.float64)
    probs = np.asarray(expected_probs, dtype=np.float64)
    if observed.shape != probs.shape:
        raise StatTestError(f"shape mismatch: {observed.shape} vs {probs.shape}")
    total = observed.sum()
    if total <= 0 or probs.sum() <= 0:
        raise StatTestError("chi-square test needs a positive number of observations")

    expected = probs / probs.sum() * total
    obs, exp = merge_sparse_bins(observed, expected, min_expected)
    if len(obs) < 2:
        raise StatTestError("chi-square test needs at least two bins after merging")

    statistic, p_value = stats.chisquare(obs, exp)
    return StatTest(
        kind="chi_square_gof",
        statistic=float(statistic),
        p_value=float(p_value),
        decision_value=float(p_value),
        threshold=threshold,
        comparator="gt",
        detail=f"{len(obs)} bins, {int(total)} observations",
    )


def _category_codes(sample_a: np.ndarray, sample_b: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    a = np.asarray(sample_a)
    b = np.asarray(sample_b)
    if a.ndim == 1:
        a, b = a[:, None], b[:, None]
    combined = np.concatenate([a, b])
    _, codes = np.unique(combined, axis=0, return_inverse=True)
    codes = codes.reshape(-1)
    return codes[: len(a)], codes[len(a) :], int(codes.max()) + 1


def chi_square_two_sample(
    sample_a: Sequence,
    sample_b: Sequence,
    threshold: float = 1e-3,
    min_count: float = MIN_EXPECTED,
) -> StatTest:
    """
    Chi-square homogeneity test between two samples of categorical values.

    Values may be scalars or fixed-length tuples (e.g. comb vertices).
    Rare categories are pooled into one bin.
    """
    if len(sample_a) == 0 or len(sample_b) == 0:
        raise StatTestError("two-sample test needs two nonempty samples")
    codes_a, codes_b, n_categories = _category_codes(np.asarray(sample_a), np.asarray(sample_b))
    table = np.vstack(
        [
            np.bincount(codes_a, minlength=n_categories),
            np.bincount(codes_b, minlength=n_categories),
        ]
    ).astype(np.float64)

    common = table.sum(axis=0) >= min_count
    pooled = table[:, ~common].sum(axis=1, keepdims=True)
    table = table[:, common]
    if pooled.sum() > 0:
        table = np.hstack([table, pooled])
    if table.shape[1] < 2:
        raise StatTestError("two-sample test needs at least two categories")

    statistic, p_value, _, _ = stats.chi2_contingency(table, correction=False)
    return StatTest(
        kind="chi_square_two_sample",
        statistic=float(statistic),
        p_value=float(p_value),
        decision_value=float(p_value),
        threshold=threshold,
        comparator="gt",
        detail=f"{table.shape[1]} categories",
    )


def ks_test(
    samples: Sequence[float],
    cdf: Callable[[float], float],
    threshold: float = 0.02,
) -> StatTest:
    """
    Kolmogorov-Smirnov distance to a reference CDF; passes when D <= threshold.

    The reference is evaluated once per distinct sample value.
    """
    values = np.asarray(samples, dtype=np.float64)
    if values.size == 0:
        raise StatTestError("KS test needs at least one sample")
    unique = np.unique(values)
    table = np.array([cdf(float(v)) for v in unique])

    def cached_cdf(x: np.ndarray) -> np.ndarray:
        return table[np.searchsorted(unique, x)]

    result = stats.kstest(values, cached_cdf)
    return StatTest(
        kind="ks",
        statistic=float(result.statistic),
        p_value=float(result.pvalue),
        decision_value=float(result.statistic),
        threshold=threshold,
        comparator="le",
        detail=f"{values.size} samples",
    )


def ks_two_sample(sample_a: Sequence[float], sample_b: Sequence[float], threshold: float = 0.02) -> StatTest:
    """Two-sample KS distance; passes when D <= threshold."""
    if len(sample_a) == 0 or len(sample_b) == 0:
        raise StatTestError("two-sample KS needs two nonempty samples")
    result = stats.ks_2samp(sample_a, sample_b)
    return StatTest(
        kind="ks_two_sample",
        statistic=float(result.statistic),
        p_value=float(result.pvalue),
        decision_value=float(result.statistic),
        threshold=threshold,
        comparator="le",
    )


def slope_fit(
    x: Sequence[float],
    y: Sequence[float],
    threshold: float,
    comparator: Literal["ge", "gt", "le", "lt"] = "le",
) -> StatTest:
    """Least-squares slope of y on x compared against threshold."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.size < 2 or np.ptp(xs) == 0:
        raise StatTestError("slope fit needs at least two distinct x values")
    result = stats.linregress(xs, ys)
    return StatTest(
        kind="slope_fit",
        statistic=float(result.slope),
        p_value=float(result.pvalue) if xs.size > 2 else None,
        decision_value=float(result.slope),
        threshold=threshold,
        comparator=comparator,
        detail=f"intercept={result.intercept:.4g}, r={result.rvalue:.4f}",
    )
