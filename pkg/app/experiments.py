"""
Monte Carlo experiments over ensembles of walkers.

Each experiment returns an ExperimentReport: per-checkpoint rows ready for
CSV output and a list of verdicts, each checking one claim against a band
or threshold. Replicates are independent and reduced in replicate order.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from scipy.stats import nbinom

from app.ensemble import ensemble_paths, map_replicates, walker_stream
from app.kernel_analysis import backbone_return_prob
from app.metrics import (
    collision_indicators,
    comb_distance_array,
    expected_pairwise_collisions,
    max_pairwise_distance_paths,
)
from app.models import ExperimentReport, ReportRow, Verdict
from app.passage import dk_limit_cdf, dk_pair_cdf, gaussian_diameter_samples
from app.rng import RngStream, derive_stream_id, sample_geometric_array
from app.stats import chi_square_two_sample, ks_test, ks_two_sample, slope_fit
from app.walks import comb_endpoints_direct, comb_path_constructed, sample_zd_endpoint

logger = logging.getLogger(__name__)

Graph = Literal["zd", "comb"]
Statistic = Literal["dk", "norm", "c1", "c2"]

# log log n needs n well above e^e
MIN_LIL_HORIZON = 1000
MIN_BURN_IN = 16

# Horizontal range constant 2^(5/4) / 3^(3/4)
HORIZONTAL_LIL_CONSTANT = 2**1.25 / 3**0.75

# Lower and upper band factors around each LIL target
LIL_BAND_FACTORS: dict[tuple[str, str], tuple[float, float]] = {
    ("zd", "dk"): (0.65, 1.1),
    ("zd", "norm"): (0.65, 1.1),
    ("comb", "dk"): (0.7, 1.1),
    ("comb", "c2"): (0.7, 1.1),
    ("comb", "c1"): (0.5, 1.3),
}

# Walks simulated together in one block of the tail checks
TAIL_BLOCK = 200


def params_hash(experiment: str, params: dict[str, Any]) -> str:
    """SHA-256 of the experiment name and its sorted parameters."""
    text = json.dumps({"experiment": experiment, **params}, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def dyadic_grid(lo: int, hi: int) -> list[int]:
    """Powers of two in [lo, hi], plus hi."""
    grid = []
    power = 1
    while power <= hi:
        if power >= lo:
            grid.append(power)
        power *= 2
    if not grid or grid[-1] != hi:
        grid.append(hi)
    return grid


def _nearest_at_most(grid: list[int], value: int) -> int:
    eligible = [g for g in grid if g <= value]
    return eligible[-1] if eligible else grid[0]


def _within(value: float, target: float, rel: float) -> bool:
    return abs(value - target) <= rel * abs(target)


# --- LIL profiles ------------------------------------------------------------


def lil_target(graph: Graph, statistic: Statistic, d: int = 1) -> float:
    """Almost-sure limsup of statistic / normalizer."""
    key = (graph, statistic)
    if key == ("zd", "dk"):
        return 2.0 / math.sqrt(d)
    if key == ("zd", "norm"):
        return math.sqrt(2.0 / d)
    if key in (("comb", "dk"), ("comb", "c2")):
        return 1.0
    if key == ("comb", "c1"):
        return HORIZONTAL_LIL_CONSTANT
    raise ValueError(f"statistic {statistic!r} is not defined for graph {graph!r}")


def lil_normalizer(graph: Graph, statistic: Statistic, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    loglog = np.log(np.log(m))
    if graph == "zd":
        return np.sqrt(m * loglog)
    if statistic == "dk":
        return 2.0 * np.sqrt(m * loglog)
    if statistic == "c2":
        return np.sqrt(2.0 * m * loglog)
    return m**0.25 * loglog**0.75


def statistic_path(graph: Graph, statistic: Statistic, paths: list[np.ndarray]) -> np.ndarray:
    """Value of the statistic at every time of aligned paths."""
    if statistic == "dk":
        return max_pairwise_distance_paths(paths, "comb" if graph == "comb" else "euclidean")
    first = paths[0]
    if statistic == "norm":
        return np.sqrt((first.astype(np.float64) ** 2).sum(axis=1))
    if statistic == "c1":
        return np.abs(first[:, 0]).astype(np.float64)
    return np.abs(first[:, 1]).astype(np.float64)


@dataclass
class LilProfile:
    """Running maxima of statistic / normalizer per replicate at each checkpoint."""

    graph: Graph
    statistic: Statistic
    K: int
    d: int
    checkpoints: list[int]
    running_max: np.ndarray
    target_constant: float

    @property
    def ensemble_max(self) -> np.ndarray:
        return self.running_max.max(axis=0)

    @property
    def ensemble_median(self) -> np.ndarray:
        return np.median(self.running_max, axis=0)


def lil_profile(
    graph: Graph,
    statistic: Statistic,
    K: int,
    n_max: int,
    replicates: int,
    seed: int,
    *,
    d: int = 1,
    burn_in: int = 1024,
    engine: Literal["direct", "constructed"] = "constructed",
    threads: int = 1,
) -> LilProfile:
    """
    Running maximum of a normalized statistic, from burn_in up to n_max.

    Walker i uses the same stream whatever K is, so D_K profiles are
    pathwise coupled across ensemble sizes.
    """
    if n_max < MIN_LIL_HORIZON:
        raise ValueError(f"n_max must be >= {MIN_LIL_HORIZON} for log log normalizers, got {n_max}")
    if not MIN_BURN_IN <= burn_in < n_max:
        raise ValueError(f"burn_in must lie in [{MIN_BURN_IN}, n_max), got {burn_in}")
    target = lil_target(graph, statistic, d)
    if statistic == "dk" and K < 2:
        raise ValueError(f"distance statistics need K >= 2, got {K}")

    walkers = K if statistic == "dk" else 1
    checkpoints = dyadic_grid(burn_in, n_max)
    offsets = np.asarray(checkpoints) - burn_in
    m = np.arange(burn_in, n_max + 1)
    normalizer = lil_normalizer(graph, statistic, m)
    experiment = f"lil:{graph}:{d}"

    def one(replicate: int) -> np.ndarray:
        paths = ensemble_paths(graph, walkers, n_max, seed, experiment, replicate, d=d, engine=engine)
        ratio = statistic_path(graph, statistic, paths)[burn_in:] / normalizer
        return np.maximum.accumulate(ratio)[offsets]

    running = np.vstack(map_replicates(one, replicates, threads))
    return LilProfile(graph, statistic, K, d, checkpoints, running, target)


def lil_profile_report(
    profile: LilProfile,
    seed: int,
    *,
    band: tuple[float, float] | None = None,
    config_hash: str | None = None,
) -> ExperimentReport:
    """Rows per checkpoint and the band verdict on the final ensemble median."""
    name = f"lil_profile:{profile.graph}:{profile.statistic}"
    replicates = profile.running_max.shape[0]
    target = profile.target_constant
    if band is None:
        low, high = LIL_BAND_FACTORS[(profile.graph, profile.statistic)]
        band = (low * target, high * target)

    rows = []
    for c, mx, med in zip(profile.checkpoints, profile.ensemble_max, profile.ensemble_median):
        rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                              statistic_name="running_max_ensemble_max", value=float(mx), target=target))
        rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                              statistic_name="running_max_ensemble_median", value=float(med), target=target))

    final_median = float(profile.ensemble_median[-1])
    in_band = band[0] <= final_median <= band[1]
    rows[-1] = rows[-1].model_copy(update={
        "tolerance": (band[1] - band[0]) / 2,
        "verdict": "pass" if in_band else "fail",
    })
    verdicts = [
        Verdict(
            name="lil_band",
            claim=f"running maximum of the normalized statistic settles near {target:.4f}",
            passed=in_band,
            statistic=final_median,
            threshold=band[1],
            detail=f"band [{band[0]:.4f}, {band[1]:.4f}] at n={profile.checkpoints[-1]}",
        ),
        Verdict(
            name="running_max_monotone",
            claim="running maximum is nondecreasing along every trajectory",
            passed=bool(np.all(np.diff(profile.running_max, axis=1) >= 0)),
        ),
    ]
    params = {"graph": profile.graph, "statistic": profile.statistic, "K": profile.K,
              "d": profile.d, "checkpoints": profile.checkpoints, "replicates": replicates}
    return ExperimentReport(
        experiment=name,
        config_hash=config_hash or params_hash(name, params),
        master_seed=seed,
        rows=rows,
        verdicts=verdicts,
    )


# --- Collisions --------------------------------------------------------------


def _recurrent_full_collisions(K: int, d: int) -> bool:
    return (d == 1 and K <= 3) or (d == 2 and K == 2)


def collision_growth_experiment(
    graph: Graph,
    K: int,
    n_max: int,
    replicates: int,
    seed: int,
    *,
    d: int = 1,
    late_after: int | None = None,
    oracle_replicates: int = 4000,
    rel_tolerance: float = 0.05,
    engine: Literal["direct", "constructed"] = "constructed",
    threads: int = 1,
) -> ExperimentReport:
    """
    Pairwise and full collision counts of K walkers at dyadic checkpoints.

    Collisions are counted at times 1..n; time 0 is excluded.
    """
    if K < 2:
        raise ValueError(f"collisions need K >= 2, got {K}")
    late_after = late_after or max(1, n_max // 100)
    if not 1 <= late_after < n_max:
        raise ValueError(f"late_after must lie in [1, n_max), got {late_after}")

    name = f"collision_growth:{graph}"
    checkpoints = dyadic_grid(1, n_max)
    if late_after not in checkpoints:
        checkpoints = sorted({*checkpoints, late_after})
    idx = np.asarray(checkpoints) - 1

    def one(replicate: int) -> tuple[np.ndarray, np.ndarray]:
        paths = ensemble_paths(graph, K, n_max, seed, name, replicate, d=d, engine=engine)
        pairwise, full = collision_indicators(paths)
        return np.cumsum(pairwise[1:])[idx], np.cumsum(full[1:])[idx]

    results = map_replicates(one, replicates, threads)
    pair_counts = np.vstack([r[0] for r in results])
    full_counts = np.vstack([r[1] for r in results])
    late_col = checkpoints.index(late_after)
    late_pairwise = pair_counts[:, -1] - pair_counts[:, late_col]

    rows = []
    for j, c in enumerate(checkpoints):
        for label, counts in (("pairwise", pair_counts), ("full", full_counts)):
            rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                                  statistic_name=f"{label}_mean", value=float(counts[:, j].mean())))
            rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                                  statistic_name=f"{label}_median", value=float(np.median(counts[:, j]))))
    late_median = float(np.median(late_pairwise))
    rows.append(ReportRow(experiment=name, checkpoint_n=n_max, replicate_count=replicates,
                          statistic_name=f"pairwise_after_{late_after}_median", value=late_median))

    verdicts = []
    if graph == "zd" and _recurrent_full_collisions(K, d):
        early = float(np.median(full_counts[:, late_col]))
        final = float(np.median(full_counts[:, -1]))
        verdicts.append(Verdict(
            name="full_collisions_grow",
            claim="walkers that collide infinitely often keep accumulating full collisions",
            passed=final > early,
            statistic=final,
            threshold=early,
            detail=f"median at n={late_after} vs n={n_max}",
        ))
    if graph == "comb":
        verdicts.append(Verdict(
            name="late_collisions_vanish",
            claim="two comb walkers collide only finitely often",
            passed=late_median == 0,
            statistic=late_median,
            threshold=0.0,
            detail=f"median number of collisions after n={late_after}",
        ))

    if graph == "zd" and d <= 2:
        oracle_reps = max(replicates, oracle_replicates)
        oracle_name = f"{name}:oracle"

        def short(replicate: int) -> int:
            paths = ensemble_paths("zd", K, late_after, seed, oracle_name, replicate, d=d)
            pairwise, _ = collision_indicators(paths)
            return int(pairwise[1:].sum())

        mean = float(np.mean(map_replicates(short, oracle_reps, threads)))
        expected = math.comb(K, 2) * expected_pairwise_collisions(d, late_after)
        ok = _within(mean, expected, rel_tolerance)
        rows.append(ReportRow(experiment=name, checkpoint_n=late_after, replicate_count=oracle_reps,
                              statistic_name="pairwise_mean_vs_exact", value=mean, target=expected,
                              tolerance=rel_tolerance, verdict="pass" if ok else "fail"))
        verdicts.append(Verdict(
            name="pairwise_mean_exact",
            claim="mean pairwise collision count matches the difference-walk return sum",
            passed=ok,
            statistic=mean,
            threshold=expected,
            detail=f"relative tolerance {rel_tolerance}",
        ))

    params = {"graph": graph, "K": K, "d": d, "n_max": n_max, "replicates": replicates,
              "late_after": late_after, "engine": engine}
    return ExperimentReport(experiment=name, config_hash=params_hash(name, params),
                            master_seed=seed, rows=rows, verdicts=verdicts)


def backbone_coincidence_experiment(
    n_max: int,
    replicates: int,
    seed: int,
    *,
    engine: Literal["direct", "constructed"] = "constructed",
    threads: int = 1,
) -> ExperimentReport:
    """Times two comb walkers sit on the backbone together, against (2/pi) ln n."""
    if n_max < 100:
        raise ValueError(f"n_max must be >= 100, got {n_max}")
    name = "backbone_coincidence"
    checkpoints = dyadic_grid(1, n_max)
    early = _nearest_at_most(checkpoints, n_max // 100)
    idx = np.asarray(checkpoints) - 1

    def one(replicate: int) -> np.ndarray:
        a, b = ensemble_paths("comb", 2, n_max, seed, name, replicate, engine=engine)
        both = (a[1:, 1] == 0) & (b[1:, 1] == 0)
        return np.cumsum(both)[idx]

    counts = np.vstack(map_replicates(one, replicates, threads))
    means = counts.mean(axis=0)

    rows = []
    for j, c in enumerate(checkpoints):
        target = 2.0 / math.pi * math.log(c) if c > 1 else None
        rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                              statistic_name="coincidence_mean", value=float(means[j]), target=target))
        rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                              statistic_name="coincidence_median", value=float(np.median(counts[:, j]))))

    target = 2.0 / math.pi * math.log(n_max)
    final = float(means[-1])
    early_mean = float(means[checkpoints.index(early)])
    verdicts = [
        Verdict(
            name="coincidence_rate",
            claim="simultaneous backbone visits grow like (2/pi) ln n",
            passed=target / 2 <= final <= 2 * target,
            statistic=final,
            threshold=target,
            detail="within a factor 2",
        ),
        Verdict(
            name="coincidence_growth",
            claim="simultaneous backbone visits keep occurring",
            passed=final > early_mean,
            statistic=final,
            threshold=early_mean,
            detail=f"mean at n={early} vs n={n_max}",
        ),
        Verdict(
            name="coincidence_monotone",
            claim="counts are nondecreasing along every trajectory",
            passed=bool(np.all(np.diff(counts, axis=1) >= 0)),
        ),
    ]
    params = {"n_max": n_max, "replicates": replicates, "engine": engine}
    return ExperimentReport(experiment=name, config_hash=params_hash(name, params),
                            master_seed=seed, rows=rows, verdicts=verdicts)


# --- Distance CDF ------------------------------------------------------------

CDF_GRID = (0.5, 1.0, 2.0, 3.0)


def distance_cdf_experiment(
    d: int,
    K: int,
    n: int,
    replicates: int,
    seed: int,
    *,
    threshold: float = 0.02,
    threads: int = 1,
) -> ExperimentReport:
    """
    Empirical law of D_K(n)/sqrt(n) against its Gaussian limit.

    On Z the reference is the quadrature CDF (closed form for K = 2); for
    d >= 2 it is a sample of the Gaussian limit and the test is two-sample.
    """
    if K < 2:
        raise ValueError(f"distance experiments need K >= 2, got {K}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    name = f"distance_cdf:d{d}:K{K}"

    def one(replicate: int) -> float:
        points = [sample_zd_endpoint(d, n, walker_stream(seed, name, w, replicate)) for w in range(K)]
        best = 0.0
        for i in range(K):
            for j in range(i + 1, K):
                best = max(best, float(np.linalg.norm(points[i] - points[j])))
        return best / math.sqrt(n)

    scaled = np.asarray(map_replicates(one, replicates, threads))

    if d == 1:
        def reference(z: float) -> float:
            return dk_pair_cdf(z) if K == 2 else dk_limit_cdf(z, K)

        test = ks_test(scaled, reference, threshold)
        reference_at = reference
    else:
        ref_rng = RngStream(seed, derive_stream_id(name, "reference"))
        ref_sample = np.sort(gaussian_diameter_samples(K, d, replicates, ref_rng))
        test = ks_two_sample(scaled, ref_sample, threshold)

        def reference_at(z: float) -> float:
            return float(np.searchsorted(ref_sample, z, side="right") / len(ref_sample))

    rows = [
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates, statistic_name="ks_distance",
                  value=test.statistic, tolerance=threshold, verdict="pass" if test.verdict else "fail"),
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="collision_frequency", value=float(np.mean(scaled == 0.0))),
    ]
    for z in CDF_GRID:
        rows.append(ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                              statistic_name=f"cdf_at_{z:g}", value=float(np.mean(scaled <= z)),
                              target=reference_at(z)))

    verdicts = [Verdict(
        name="distance_cdf_ks",
        claim="rescaled diameter of the ensemble follows the Gaussian limit law",
        passed=test.verdict,
        statistic=test.statistic,
        threshold=threshold,
        detail=test.detail or "",
    )]
    params = {"d": d, "K": K, "n": n, "replicates": replicates, "threshold": threshold}
    return ExperimentReport(experiment=name, config_hash=params_hash(name, params),
                            master_seed=seed, rows=rows, verdicts=verdicts)


# --- Lower class -------------------------------------------------------------

# 2^(9/4) / 3^(3/4): liminf scale of the two-walker comb distance
PAIR_LIMINF_CONSTANT = 2**2.25 / 3**0.75


def lower_class_experiment(
    n_max: int,
    replicates: int,
    seed: int,
    eps: float = 0.05,
    *,
    start: int = 4096,
    slope_slack: float = 0.15,
    engine: Literal["direct", "constructed"] = "constructed",
    threads: int = 1,
) -> ExperimentReport:
    """
    How close two comb walkers come, at dyadic times and over the whole path.

    At each dyadic n the event {D_2 <= n^(1/4 - eps)} is split into the
    different-teeth part and the same-tooth part; the latter is split again
    by whether both walkers stay below height n^(1/4).
    """
    if not 0 < eps < 0.125:
        raise ValueError(f"eps must lie in (0, 1/8), got {eps}")
    if n_max < start:
        raise ValueError(f"n_max must be >= start={start}, got {n_max}")
    name = "lower_class"
    grid = dyadic_grid(start, n_max)
    idx = np.asarray(grid)
    grid_n = idx.astype(np.float64)
    near = grid_n ** (0.25 - eps)
    m = np.arange(start, n_max + 1, dtype=np.float64)
    liminf_scale = (1 + eps) * PAIR_LIMINF_CONSTANT * m**0.25 * np.log(np.log(m)) ** 0.75

    def one(replicate: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool, float]:
        a, b = ensemble_paths("comb", 2, n_max, seed, name, replicate, engine=engine)
        dist = comb_distance_array(a[:, 0], a[:, 1], b[:, 0], b[:, 1])
        close = dist[idx] <= near
        same_tooth = a[idx, 0] == b[idx, 0]
        low = np.maximum(np.abs(a[idx, 1]), np.abs(b[idx, 1])) <= grid_n**0.25
        different = close & ~same_tooth
        same_low = close & same_tooth & low
        same_high = close & same_tooth & ~low
        liminf_hit = bool(np.any(dist[start:] <= liminf_scale))
        return different, same_low, same_high, liminf_hit, float(dist[-1])

    results = map_replicates(one, replicates, threads)
    different = np.vstack([r[0] for r in results]).mean(axis=0)
    same_low = np.vstack([r[1] for r in results]).mean(axis=0)
    same_high = np.vstack([r[2] for r in results]).mean(axis=0)
    liminf_fraction = float(np.mean([r[3] for r in results]))
    final_far = float(np.mean([r[4] > n_max ** (0.25 - eps) for r in results]))

    rows = []
    for j, c in enumerate(grid):
        for label, freq in (("different_teeth", different), ("same_tooth_low", same_low),
                            ("same_tooth_high", same_high)):
            rows.append(ReportRow(experiment=name, checkpoint_n=c, replicate_count=replicates,
                                  statistic_name=f"close_{label}_frequency", value=float(freq[j])))

    slope_threshold = -(0.5 + 3 * eps) + slope_slack
    positive = different > 0
    if positive.sum() >= 2:
        fit = slope_fit(np.log(grid_n[positive]), np.log(different[positive]), slope_threshold, "le")
        slope, decays, detail = fit.statistic, fit.verdict, fit.detail or ""
    else:
        slope, decays = -math.inf, True
        detail = "fewer than two dyadic times with events"
    rows.append(ReportRow(experiment=name, checkpoint_n=n_max, replicate_count=replicates,
                          statistic_name="different_teeth_loglog_slope", value=slope,
                          target=slope_threshold, verdict="pass" if decays else "fail"))
    rows.append(ReportRow(experiment=name, checkpoint_n=n_max, replicate_count=replicates,
                          statistic_name="liminf_event_fraction", value=liminf_fraction, target=0.5,
                          verdict="pass" if liminf_fraction >= 0.5 else "fail"))
    rows.append(ReportRow(experiment=name, checkpoint_n=n_max, replicate_count=replicates,
                          statistic_name="final_distance_above_fraction", value=final_far, target=0.99,
                          verdict="pass" if final_far >= 0.99 else "fail"))

    verdicts = [
        Verdict(name="close_different_teeth_decay",
                claim="walkers on different teeth are rarely within n^(1/4 - eps)",
                passed=decays, statistic=slope, threshold=slope_threshold, detail=detail),
        Verdict(name="liminf_event_reached",
                claim="the pair distance drops to its liminf scale along the path",
                passed=liminf_fraction >= 0.5, statistic=liminf_fraction, threshold=0.5),
        Verdict(name="final_distance_large",
                claim="eventually the pair distance exceeds n^(1/4 - eps)",
                passed=final_far >= 0.99, statistic=final_far, threshold=0.99),
    ]
    params = {"n_max": n_max, "replicates": replicates, "eps": eps, "start": start, "engine": engine}
    return ExperimentReport(experiment=name, config_hash=params_hash(name, params),
                            master_seed=seed, rows=rows, verdicts=verdicts)


# --- Tail bounds -------------------------------------------------------------

LOCAL_TIME_GRID = (1.5, 2.0, 2.5)


def _blocks(total: int, size: int) -> list[int]:
    full, rest = divmod(total, size)
    return [size] * full + ([rest] if rest else [])


def tail_bound_checks(
    n: int,
    replicates: int,
    seed: int,
    *,
    delta: float = 0.5,
    local_time_n: int = 10_000,
    local_time_replicates: int | None = None,
    comb_n: int = 4096,
    comb_replicates: int | None = None,
    min_slope: float = 0.8,
    threads: int = 1,
) -> ExperimentReport:
    """
    Empirical tails against their bounds.

    (i)   max_j |sum_{i<=j} (G_i - 1)| > sqrt(32 n)  vs  2 exp(-4)
    (ii)  sum G_i >= (1 + delta) n                   vs  1/n^2
    (iii) local time at 0: slope of log P(xi/sqrt(n) >= x) against -x^2/2
    (iv)  H_n >= 3 sqrt(n log n) on the comb         vs  2/n
    (v)   max |C1| >= n^(1/4) log n on the comb      vs  3/n
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    name = "tail_bounds"
    local_time_replicates = local_time_replicates or replicates
    comb_replicates = comb_replicates or min(replicates, 10_000)
    rows: list[ReportRow] = []
    verdicts: list[Verdict] = []

    # (i) and (ii) share the geometric draws
    lam = math.sqrt(32 * n)
    level = (1 + delta) * n
    sizes = _blocks(replicates, TAIL_BLOCK * 10)

    def geometric_block(block: int) -> tuple[int, int]:
        rng = walker_stream(seed, f"{name}:geometric", 0, block)
        g = sample_geometric_array(rng, (sizes[block], n))
        deviation = np.abs(np.cumsum(g - 1, axis=1)).max(axis=1)
        return int(np.count_nonzero(deviation > lam)), int(np.count_nonzero(g.sum(axis=1) >= level))

    counts = map_replicates(geometric_block, len(sizes), threads)
    dev_freq = sum(c[0] for c in counts) / replicates
    sum_freq = sum(c[1] for c in counts) / replicates

    dev_bound = 2 * math.exp(-lam**2 / (8 * n))
    sum_bound = 1.0 / n**2
    sum_sigma = math.sqrt(sum_bound * (1 - sum_bound) / replicates)
    exact_sum_tail = float(nbinom.sf(math.ceil(level) - 1, n, 0.5))
    rows += [
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="geometric_partial_sum_tail", value=dev_freq, target=dev_bound,
                  verdict="pass" if dev_freq <= dev_bound else "fail"),
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="geometric_sum_tail", value=sum_freq, target=sum_bound,
                  tolerance=3 * sum_sigma, verdict="pass" if sum_freq <= sum_bound + 3 * sum_sigma else "fail"),
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="geometric_sum_tail_exact", value=exact_sum_tail),
    ]
    verdicts += [
        Verdict(name="geometric_partial_sum_tail",
                claim="partial sums of centred geometric variables rarely stray beyond sqrt(32 n)",
                passed=dev_freq <= dev_bound, statistic=dev_freq, threshold=dev_bound),
        Verdict(name="geometric_sum_tail",
                claim="a sum of n geometric variables rarely exceeds (1 + delta) n",
                passed=sum_freq <= sum_bound + 3 * sum_sigma, statistic=sum_freq,
                threshold=sum_bound + 3 * sum_sigma),
    ]

    # (iii) local time
    lt_sizes = _blocks(local_time_replicates, TAIL_BLOCK)

    def local_time_block(block: int) -> np.ndarray:
        rng = walker_stream(seed, f"{name}:local_time", 0, block)
        steps = rng.signs(lt_sizes[block] * local_time_n).reshape(lt_sizes[block], local_time_n)
        return np.count_nonzero(np.cumsum(steps, axis=1) == 0, axis=1)

    local_times = np.concatenate(map_replicates(local_time_block, len(lt_sizes), threads))
    scaled = local_times / math.sqrt(local_time_n)
    grid = np.asarray(LOCAL_TIME_GRID)
    freqs = np.array([np.mean(scaled >= x) for x in grid])
    for x, f in zip(grid, freqs):
        rows.append(ReportRow(experiment=name, checkpoint_n=local_time_n, replicate_count=local_time_replicates,
                              statistic_name=f"local_time_tail_at_{x:g}", value=float(f)))
    positive = freqs > 0
    if positive.sum() >= 2:
        fit = slope_fit(-grid[positive] ** 2 / 2, np.log(freqs[positive]), min_slope, "ge")
        lt_slope, lt_ok = fit.statistic, fit.verdict
    else:
        lt_slope, lt_ok = math.nan, False
    rows.append(ReportRow(experiment=name, checkpoint_n=local_time_n, replicate_count=local_time_replicates,
                          statistic_name="local_time_tail_slope", value=lt_slope, target=1.0,
                          verdict="pass" if lt_ok else "fail"))
    verdicts.append(Verdict(name="local_time_tail",
                            claim="local time at zero has a Gaussian-type tail",
                            passed=lt_ok, statistic=lt_slope, threshold=min_slope))

    # (iv) and (v) on the comb
    h_level = 3 * math.sqrt(comb_n * math.log(comb_n))
    m_level = comb_n**0.25 * math.log(comb_n)

    def comb_one(replicate: int) -> tuple[bool, bool]:
        path = comb_path_constructed(comb_n, walker_stream(seed, f"{name}:comb", 0, replicate))
        return path.horizontal_steps >= h_level, int(np.abs(path.x).max()) >= m_level

    comb_hits = map_replicates(comb_one, comb_replicates, threads)
    for label, column, bound in (("horizontal_steps_tail", 0, 2.0 / comb_n),
                                 ("horizontal_range_tail", 1, 3.0 / comb_n)):
        freq = float(np.mean([hit[column] for hit in comb_hits]))
        sigma = math.sqrt(bound * (1 - bound) / comb_replicates)
        ok = freq <= bound + 3 * sigma
        rows.append(ReportRow(experiment=name, checkpoint_n=comb_n, replicate_count=comb_replicates,
                              statistic_name=label, value=freq, target=bound, tolerance=3 * sigma,
                              verdict="pass" if ok else "fail"))
        verdicts.append(Verdict(name=label, claim=f"comb {label.replace('_', ' ')} stays below its bound",
                                passed=ok, statistic=freq, threshold=bound + 3 * sigma))

    params = {"n": n, "replicates": replicates, "delta": delta, "local_time_n": local_time_n,
              "local_time_replicates": local_time_replicates, "comb_n": comb_n,
              "comb_replicates": comb_replicates, "min_slope": min_slope}
    return ExperimentReport(experiment=name, config_hash=params_hash(name, params),
                            master_seed=seed, rows=rows, verdicts=verdicts)


# --- Construction equivalence ------------------------------------------------


def construction_equivalence_experiment(
    n: int,
    replicates: int,
    seed: int,
    *,
    threshold: float = 1e-3,
    threads: int = 1,
) -> ExperimentReport:
    """Direct and constructed comb walks compared by their law at time n."""
    name = "construction_equivalence"
    direct_rng = RngStream(seed, derive_stream_id(name, "direct"))
    dx, dy = comb_endpoints_direct(n, direct_rng, replicates)

    def one(replicate: int) -> tuple[int, int, bool]:
        path = comb_path_constructed(n, walker_stream(seed, name, 0, replicate))
        balanced = path.horizontal_steps + path.vertical_steps == n and len(path.horizontal) == n
        return int(path.x[-1]), int(path.y[-1]), balanced

    constructed = map_replicates(one, replicates, threads)
    cx = np.array([c[0] for c in constructed])
    cy = np.array([c[1] for c in constructed])
    balanced = all(c[2] for c in constructed)

    test = chi_square_two_sample(np.column_stack([dx, dy]), np.column_stack([cx, cy]), threshold)
    backbone_exact = backbone_return_prob(n)
    backbone_direct = float(np.mean(dy == 0))
    backbone_sigma = math.sqrt(backbone_exact * (1 - backbone_exact) / replicates)
    backbone_ok = abs(backbone_direct - backbone_exact) <= 4 * backbone_sigma

    rows = [
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="two_sample_p_value", value=float(test.p_value), target=threshold,
                  verdict="pass" if test.verdict else "fail"),
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="backbone_frequency_direct", value=backbone_direct, target=backbone_exact,
                  tolerance=4 * backbone_sigma, verdict="pass" if backbone_ok else "fail"),
        ReportRow(experiment=name, checkpoint_n=n, replicate_count=replicates,
                  statistic_name="backbone_frequency_constructed", value=float(np.mean(cy == 0)),
                  target=backbone_exact),
    ]
    verdicts = [
        Verdict(name="construction_equivalence",
                claim="the constructed walk has the law of the comb walk",
                passed=test.verdict, statistic=test.p_value, threshold=threshold, detail=test.detail or ""),
        Verdict(name="step_balance",
                claim="horizontal plus vertical steps equal n on every run",
                passed=balanced),
        Verdict(name="backbone_frequency",
                claim="simulated backbone frequency matches the exact return probability",
                passed=backbone_ok, statistic=backbone_direct, threshold=backbone_exact),
    ]
    params = {"n": n, "replicates": replicates, "threshold": threshold}
    return ExperimentReport(experiment=name, config_hash=params_hash(name, params),
                            master_seed=seed, rows=rows, verdicts=verdicts)
