"""
Dispatch validated configs to the labs and write artifacts.

Every run produces an ExperimentReport; run() writes it as a CSV of rows
and a JSON summary carrying config hash, seed, verdicts and wall time.
"""

import csv
import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from app.config import config_hash, to_canonical
from app.ensemble import map_replicates, walker_stream
from app.errors import CriterionDegenerateError
from app.experiments import (
    backbone_coincidence_experiment,
    collision_growth_experiment,
    construction_equivalence_experiment,
    distance_cdf_experiment,
    dyadic_grid,
    lil_profile,
    lil_profile_report,
    lower_class_experiment,
    tail_bound_checks,
)
from app.genfn import backbone_generating_fn, green_function_eval
from app.kernel import comb_kernel_dp, iter_kernel_tables, write_golden
from app.kernel_analysis import (
    backbone_return_asymptotic,
    backbone_return_prob,
    fixed_vertex_ratio,
    joint_profile_bound,
    kernel_partial_sum,
    reversibility_defect,
    tooth_kernel_ratio,
    vertical_profile_bound,
)
from app.metrics import comb_bfs_distances, comb_graph_distance, expected_pairwise_collisions
from app.models import ExperimentConfig, ExperimentKind, ExperimentReport, ReportRow, Verdict
from app.passage import (
    dk_limit_cdf,
    dk_limit_cdf_mc,
    dk_pair_cdf,
    hitting_counts_bruteforce,
    hitting_limit_cdf,
    hitting_pmf,
    hitting_pmf_exact,
    sample_hitting_times,
)
from app.rng import RngStream, derive_stream_id
from app.series import SeriesCriterion, criterion_exponent, series_classify
from app.settings import CSV_COLUMNS, CSV_SCHEMA_VERSION
from app.stats import chi_square_gof
from app.walks import CombVertex, simulate_comb_constructed, simulate_comb_direct, simulate_zd

logger = logging.getLogger(__name__)

# Reversibility and parity checks must hold to this absolute tolerance
EXACT_TOLERANCE = 1e-12

# Hitting-time samples simulated per stream
HITTING_CHUNK = 20_000

# z values 1 - 2^-j for the backbone generating function scan
GENFN_EXPONENTS = tuple(range(4, 13))


@dataclass
class RunOutcome:
    report: ExperimentReport
    paths: list[Path] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.report.passed else 1


def _row(experiment: str, name: str, value: float, *, n: int | None = None,
         replicates: int = 1, target: float | None = None, tolerance: float | None = None,
         passed: bool | None = None) -> ReportRow:
    verdict = "info" if passed is None else ("pass" if passed else "fail")
    return ReportRow(experiment=experiment, checkpoint_n=n, replicate_count=replicates,
                     statistic_name=name, value=float(value), target=target, tolerance=tolerance,
                     verdict=verdict)


def _report(cfg: ExperimentConfig, rows: list[ReportRow], verdicts: list[Verdict]) -> ExperimentReport:
    return ExperimentReport(experiment=cfg.kind.value, config_hash=config_hash(cfg),
                            master_seed=cfg.master_seed, rows=rows, verdicts=verdicts)


# --- simulate ----------------------------------------------------------------


def _run_simulate_zd(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    n = cfg.n_max

    def one(replicate: int):
        return simulate_zd(cfg.d, n, walker_stream(cfg.master_seed, name, 0, replicate))

    trajectories = map_replicates(one, cfg.replicates, cfg.threads)
    rows = []
    for j, (t, _) in enumerate(trajectories[0].checkpoints):
        sq = np.array([sum(c * c for c in traj.checkpoints[j][1]) for traj in trajectories], dtype=np.float64)
        rows.append(_row(name, "mean_square_norm", sq.mean(), n=t, replicates=cfg.replicates, target=t))

    final_sq = np.array([sum(c * c for c in traj.final_state) for traj in trajectories], dtype=np.float64)
    # Var ||S_n||^2 is about 2 n^2 / d
    sigma = math.sqrt(2.0 / cfg.d) * n / math.sqrt(cfg.replicates) if n else 0.0
    spread_ok = abs(final_sq.mean() - n) <= 4 * sigma
    verdicts = [Verdict(name="mean_square_displacement", claim="E||S_n||^2 = n",
                        passed=spread_ok, statistic=float(final_sq.mean()), threshold=float(n),
                        detail="within four standard errors")]

    if cfg.d == 1 and n >= 2:
        local = np.array([traj.local_time_zero for traj in trajectories], dtype=np.float64)
        expected = expected_pairwise_collisions(1, n // 2)
        rows.append(_row(name, "local_time_zero_mean", local.mean(), n=n, replicates=cfg.replicates,
                         target=expected))
    return _report(cfg, rows, verdicts)


def _run_simulate_comb(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    n = cfg.n_max
    simulate = simulate_comb_direct if cfg.engine == "direct" else simulate_comb_constructed

    def one(replicate: int):
        return simulate(n, walker_stream(cfg.master_seed, name, 0, replicate))

    trajectories = map_replicates(one, cfg.replicates, cfg.threads)
    rows = []
    for j, (t, _) in enumerate(trajectories[0].checkpoints):
        xs = np.array([abs(traj.checkpoints[j][1][0]) for traj in trajectories], dtype=np.float64)
        ys = np.array([abs(traj.checkpoints[j][1][1]) for traj in trajectories], dtype=np.float64)
        rows.append(_row(name, "mean_abs_x", xs.mean(), n=t, replicates=cfg.replicates))
        rows.append(_row(name, "mean_abs_y", ys.mean(), n=t, replicates=cfg.replicates))

    balanced = all(t.horizontal_steps + t.vertical_steps == n for t in trajectories)
    rows.append(_row(name, "mean_horizontal_steps",
                     np.mean([t.horizontal_steps for t in trajectories]), n=n, replicates=cfg.replicates))
    verdicts = [Verdict(name="step_balance", claim="horizontal plus vertical steps equal n on every run",
                        passed=balanced)]

    exact = backbone_return_prob(n)
    freq = float(np.mean([t.final_state[1] == 0 for t in trajectories]))
    sigma = math.sqrt(exact * (1 - exact) / cfg.replicates)
    ok = abs(freq - exact) <= 4 * sigma + 1e-12
    rows.append(_row(name, "backbone_frequency", freq, n=n, replicates=cfg.replicates, target=exact,
                     tolerance=4 * sigma, passed=ok))
    verdicts.append(Verdict(name="backbone_frequency", claim="simulated backbone frequency matches P(C2(n) = 0)",
                            passed=ok, statistic=freq, threshold=exact))
    return _report(cfg, rows, verdicts)


def _run_construction_equivalence(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    report = construction_equivalence_experiment(
        cfg.n_max, cfg.replicates, cfg.master_seed,
        threshold=cfg.p_value_floor, threads=cfg.threads,
    )
    return report.model_copy(update={"config_hash": config_hash(cfg)})


# --- exact -------------------------------------------------------------------


def _run_kernel_table(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    start = CombVertex(cfg.start_x, cfg.start_y)
    n = cfg.n_max
    table = comb_kernel_dp(start, n)
    entries = table.as_dict()

    golden = out_dir / f"kernel_{start.x}_{start.y}_n{n}.txt"
    write_golden(entries, golden)
    logger.info(f"Kernel table written to {golden} ({len(entries)} entries)")

    total = math.fsum(entries.values())
    wrong_parity = math.fsum(p for v, p in entries.items() if (n + comb_graph_distance(start, v)) % 2)
    outside_ball = math.fsum(p for v, p in entries.items() if comb_graph_distance(start, v) > n)
    rows = [
        _row(name, "total_mass", total, n=n, target=1.0, tolerance=EXACT_TOLERANCE,
             passed=abs(total - 1.0) <= EXACT_TOLERANCE),
        _row(name, "wrong_parity_mass", wrong_parity, n=n, target=0.0, passed=wrong_parity == 0.0),
        _row(name, "support_size", len(entries), n=n),
        _row(name, "backbone_mass", table.backbone_mass(), n=n),
    ]
    verdicts = [
        Verdict(name="kernel_mass", claim="the n-step distribution sums to one",
                passed=abs(total - 1.0) <= EXACT_TOLERANCE, statistic=total, threshold=1.0),
        Verdict(name="kernel_support", claim="the walk only reaches vertices of the right parity within n",
                passed=wrong_parity == 0.0 and outside_ball == 0.0),
    ]
    return _report(cfg, rows, verdicts)


def _run_reversibility(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    k_max = 20 if cfg.k_max is None else cfg.k_max
    steps = sorted({*dyadic_grid(1, cfg.n_max), max(cfg.n_max - 1, 0)})
    worst = 0.0
    rows = []
    for n in steps:
        defect = max(reversibility_defect((0, 0), (0, k), n) for k in range(k_max + 1))
        worst = max(worst, defect)
        rows.append(_row(name, "max_reversibility_defect", defect, n=n, target=0.0,
                         tolerance=EXACT_TOLERANCE, passed=defect <= EXACT_TOLERANCE))
    verdicts = [Verdict(name="reversibility", claim="deg(u) p(u,v,n) = deg(v) p(v,u,n)",
                        passed=worst <= EXACT_TOLERANCE, statistic=worst, threshold=EXACT_TOLERANCE,
                        detail=f"u=(0,0), v=(0,k) for k <= {k_max}")]
    return _report(cfg, rows, verdicts)


def _run_backbone_return(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    grid = dyadic_grid(min(256, cfg.n_max), cfg.n_max)
    errors = []
    rows = []
    for table in iter_kernel_tables(CombVertex(0, 0), cfg.n_max):
        if table.steps not in grid:
            continue
        exact = table.backbone_mass()
        predicted = backbone_return_asymptotic(table.steps)
        errors.append(abs(exact / predicted - 1.0))
        rows.append(_row(name, "backbone_return_prob", exact, n=table.steps, target=predicted,
                         tolerance=cfg.rel_tolerance))
        logger.debug(f"Backbone return at n={table.steps}: {exact:.6g} (asymptotic {predicted:.6g})")

    final_ok = errors[-1] <= cfg.rel_tolerance
    improving = all(b <= a for a, b in zip(errors, errors[1:]))
    verdicts = [
        Verdict(name="backbone_return_asymptotic", claim="P(C2(n) = 0) ~ sqrt(2 / (pi n))",
                passed=final_ok, statistic=errors[-1], threshold=cfg.rel_tolerance,
                detail=f"relative error at n={grid[-1]}"),
        Verdict(name="backbone_return_convergence", claim="relative error shrinks as n grows",
                passed=improving, detail=", ".join(f"{e:.3g}" for e in errors)),
    ]
    return _report(cfg, rows, verdicts)


def _run_vertical_profile(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    rows = []
    bounded = True
    at_origin = True
    for n in sorted({max(cfg.n_max // 2, 1), cfg.n_max}):
        k_max = cfg.k_max if cfg.k_max is not None else int(n**0.4)
        profile = vertical_profile_bound(n, min(k_max, int(n**0.45)))
        base = profile.values[0] if n % 2 == 0 else profile.values[1]
        for k, value in enumerate(profile.values):
            rows.append(_row(name, f"scaled_kernel_k{k}", value, n=n))
        rows.append(_row(name, "profile_nonincreasing", float(profile.nonincreasing), n=n))
        rows.append(_row(name, "profile_sup", profile.sup_value, n=n, target=1.2 * base))
        bounded &= profile.sup_value <= 1.2 * base
        at_origin &= profile.argmax == (0 if n % 2 == 0 else 1)

        joint = joint_profile_bound(n, cfg.epsilon)
        rows.append(_row(name, "joint_profile_max", joint.max_value, n=n))
    verdicts = [
        Verdict(name="vertical_profile_bounded",
                claim="n^(3/4) p((0,0),(0,k),n) stays within 1.2 times its value nearest the backbone",
                passed=bounded),
        Verdict(name="vertical_profile_peak", claim="the scaled profile peaks nearest the backbone",
                passed=at_origin),
    ]
    return _report(cfg, rows, verdicts)


def _run_tooth_kernel(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    steps = cfg.n_max
    checked_limit = steps**0.2
    rows = []
    ok = True
    for r in range(0, cfg.level_r + 1, 2):
        ratio = tooth_kernel_ratio(steps, r)
        checked = r <= checked_limit
        passed = abs(ratio - 1.0) <= cfg.rel_tolerance if checked else None
        ok &= passed is not False
        rows.append(_row(name, f"tooth_ratio_r{r}", ratio, n=steps, target=1.0,
                         tolerance=cfg.rel_tolerance if checked else None, passed=passed))
    verdicts = [Verdict(name="tooth_kernel_shape",
                        claim="exact kernel down a tooth matches the large deviation prediction",
                        passed=ok, threshold=cfg.rel_tolerance, detail=f"checked for r <= {checked_limit:.2f}")]
    return _report(cfg, rows, verdicts)


def _run_fixed_vertex(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    u = CombVertex(cfg.start_x, cfg.start_y)
    targets = [CombVertex(u.x + dx, u.y + dy) for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1))]
    rows = []
    worst = 0.0
    for n in (cfg.n_max - 1, cfg.n_max):
        for v in targets:
            if (n + comb_graph_distance(u, v)) % 2:
                continue
            ratio = fixed_vertex_ratio(u, v, n)
            worst = max(worst, abs(ratio - 1.0))
            rows.append(_row(name, f"fixed_vertex_ratio_{v.x}_{v.y}", ratio, n=n, target=1.0,
                             tolerance=cfg.rel_tolerance, passed=abs(ratio - 1.0) <= cfg.rel_tolerance))
    verdicts = [Verdict(name="fixed_vertex_limit",
                        claim="p(u,v,n) n^(3/4) approaches 2^(-3/4) deg(v) / Gamma(1/4)",
                        passed=worst <= cfg.rel_tolerance, statistic=worst, threshold=cfg.rel_tolerance)]
    return _report(cfg, rows, verdicts)


def _run_green_function(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    z = cfg.z
    if not 0 < z < 1:
        raise ValueError(f"z must lie in (0, 1) for the series check, got {z}")
    terms = min(cfg.n_max, max(64, math.ceil(math.log(1e-15) / math.log(z))))
    rows = []
    worst = 0.0
    for k, l in ((0, 0), (1, 0), (0, 1), (2, 1), (-1, 2)):
        closed = green_function_eval(k, l, z)
        series = kernel_partial_sum(CombVertex(k, l), z, terms)
        worst = max(worst, abs(closed - series))
        rows.append(_row(name, f"green_{k}_{l}", closed, n=terms, target=series, tolerance=1e-10,
                         passed=abs(closed - series) <= 1e-10))

    scaled_errors = []
    for j in GENFN_EXPONENTS:
        value = backbone_generating_fn(1.0 - 2.0**-j)
        scaled_errors.append(abs(value.scaled / math.sqrt(2.0) - 1.0))
        rows.append(_row(name, f"backbone_genfn_scaled_j{j}", value.scaled, target=math.sqrt(2.0)))

    verdicts = [
        Verdict(name="green_function_series", claim="closed-form Green function equals the kernel power series",
                passed=worst <= 1e-10, statistic=worst, threshold=1e-10),
        Verdict(name="backbone_genfn_singularity", claim="H(z) sqrt(1 - z) tends to sqrt(2)",
                passed=scaled_errors[-1] <= 0.05 and scaled_errors[-1] < scaled_errors[0],
                statistic=scaled_errors[-1], threshold=0.05),
    ]
    return _report(cfg, rows, verdicts)


def _run_hitting_time(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    rows = []

    # exact enumeration on short paths
    enum_steps = 16
    mismatches = 0
    for r in range(1, min(cfg.level_r, 4) + 1):
        counts = hitting_counts_bruteforce(r, enum_steps)
        for n in range(1, enum_steps + 1):
            brute = Fraction(counts[n], 2**enum_steps)
            if brute != hitting_pmf_exact(r, n) or abs(hitting_pmf(r, n) - float(brute)) > EXACT_TOLERANCE:
                mismatches += 1
    rows.append(_row(name, "enumeration_mismatches", mismatches, n=enum_steps, target=0.0,
                     passed=mismatches == 0))

    # Monte Carlo against the pmf, censored at n_max
    r, cap = cfg.level_r, cfg.n_max
    sizes = [min(HITTING_CHUNK, cfg.replicates - start) for start in range(0, cfg.replicates, HITTING_CHUNK)]

    def chunk(index: int) -> np.ndarray:
        return sample_hitting_times(r, walker_stream(cfg.master_seed, name, 0, index), sizes[index], cap)

    samples = np.concatenate(map_replicates(chunk, len(sizes), cfg.threads))
    support = np.arange(r, cap + 1, 2)
    probs = hitting_pmf(r, support)
    observed = np.array([np.count_nonzero(samples == n) for n in support] + [np.count_nonzero(samples < 0)])
    expected = np.append(probs, max(0.0, 1.0 - math.fsum(probs)))
    gof = chi_square_gof(observed, expected, cfg.p_value_floor)
    rows.append(_row(name, "hitting_gof_p_value", gof.p_value, n=cap, replicates=cfg.replicates,
                     target=cfg.p_value_floor, passed=gof.verdict))

    # scaling limit at level 200
    limit_ok = True
    for u in (0.5, 1.0, 2.0):
        level = 200
        n_values = np.arange(1, math.ceil(u * level**2))
        partial = math.fsum(hitting_pmf(level, n_values))
        limit = hitting_limit_cdf(u)
        passed = abs(partial - limit) <= 0.01
        limit_ok &= passed
        rows.append(_row(name, f"hitting_cdf_u{u:g}", partial, n=level, target=limit, tolerance=0.01,
                         passed=passed))
    at_one = hitting_limit_cdf(1.0)
    limit_ok &= abs(at_one - 0.31731) <= 1e-4

    verdicts = [
        Verdict(name="hitting_pmf_exact", claim="first-passage formula matches path enumeration",
                passed=mismatches == 0, statistic=float(mismatches), threshold=0.0),
        Verdict(name="hitting_pmf_fit", claim="simulated first-passage times follow the exact law",
                passed=gof.verdict, statistic=gof.p_value, threshold=cfg.p_value_floor, detail=gof.detail or ""),
        Verdict(name="hitting_limit", claim="beta(r) / r^2 converges to the stable-1/2 law",
                passed=limit_ok, statistic=at_one, threshold=0.31731),
    ]
    return _report(cfg, rows, verdicts)


def _run_dk_limit_cdf(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    grid = (0.5, 1.0, 2.0, 3.0)
    rows = []
    closed_ok = monotone_ok = mc_ok = True
    rng = RngStream(cfg.master_seed, derive_stream_id(name, cfg.K, cfg.d))
    for z in grid:
        value = dk_limit_cdf(z, cfg.K)
        rows.append(_row(name, f"limit_cdf_z{z:g}", value))
        if cfg.K == 2:
            closed = dk_pair_cdf(z)
            closed_ok &= abs(value - closed) <= 1e-6
            rows.append(_row(name, f"pair_closed_form_z{z:g}", closed, target=value, tolerance=1e-6,
                             passed=abs(value - closed) <= 1e-6))
        monotone_ok &= dk_limit_cdf(z, cfg.K + 1) <= value + 1e-12
        estimate, stderr = dk_limit_cdf_mc(z, cfg.K, 1, cfg.replicates, rng)
        passed = abs(estimate - value) <= 4 * stderr + 1e-3
        mc_ok &= passed
        rows.append(_row(name, f"gaussian_mc_z{z:g}", estimate, replicates=cfg.replicates, target=value,
                         tolerance=4 * stderr, passed=passed))
        if cfg.d > 1:
            estimate_d, _ = dk_limit_cdf_mc(z, cfg.K, cfg.d, cfg.replicates, rng)
            rows.append(_row(name, f"gaussian_mc_d{cfg.d}_z{z:g}", estimate_d, replicates=cfg.replicates))

    verdicts = [
        Verdict(name="limit_cdf_quadrature", claim="quadrature agrees with the Gaussian sampling oracle",
                passed=mc_ok),
        Verdict(name="limit_cdf_monotone_in_K", claim="more walkers spread further apart",
                passed=monotone_ok),
    ]
    if cfg.K == 2:
        verdicts.append(Verdict(name="limit_cdf_pair_closed_form", claim="K = 2 reduces to 2 Phi(z / sqrt 2) - 1",
                                passed=closed_ok, threshold=1e-6))
    return _report(cfg, rows, verdicts)


def _run_distance_oracle(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    radius = 8 if cfg.k_max is None else cfg.k_max
    box = [CombVertex(x, y) for x in range(-radius, radius + 1) for y in range(-radius, radius + 1)]
    mismatches = 0
    for u in box:
        bfs = comb_bfs_distances(u, 4 * radius)
        mismatches += sum(bfs[v] != comb_graph_distance(u, v) for v in box)
    rows = [_row(name, "distance_mismatches", mismatches, n=len(box) ** 2, target=0.0,
                 passed=mismatches == 0)]
    verdicts = [Verdict(name="comb_distance_closed_form", claim="closed-form comb distance equals BFS distance",
                        passed=mismatches == 0, statistic=float(mismatches), threshold=0.0,
                        detail=f"all pairs with |x|, |y| <= {radius}")]
    return _report(cfg, rows, verdicts)


# --- experiment --------------------------------------------------------------


def _run_lil_profile(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    profile = lil_profile(cfg.graph, cfg.statistic, cfg.K, cfg.n_max, cfg.replicates, cfg.master_seed,
                          d=cfg.d, burn_in=cfg.burn_in, engine=cfg.engine, threads=cfg.threads)
    band = None
    if cfg.band_low is not None and cfg.band_high is not None:
        band = (cfg.band_low, cfg.band_high)
    return lil_profile_report(profile, cfg.master_seed, band=band, config_hash=config_hash(cfg))


def _ground_truth(family: str, parameter: float, p: int) -> str:
    if family == "power":
        ratio = 2.0 ** (-parameter * p)  # geometric series
        return "convergent" if ratio < 1 else "divergent"
    return "convergent" if parameter * p > 1 else "divergent"  # p-series


def _run_series_classify(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    name = cfg.kind.value
    rows = []
    disagreements = 0
    grid = [("power", a) for a in (0.05, 0.1, 0.25, 0.5, 0.75, 1.0)] + [
        ("logpower", b) for b in (0.5, 1.0, 1.5, 2.0, 3.0)
    ]
    for family, parameter in grid:
        for p in (1, 2, 3):
            got = series_classify(SeriesCriterion(family, parameter, p))
            disagreements += got != _ground_truth(family, parameter, p)

    degenerate_raises = False
    try:
        series_classify(SeriesCriterion("logpower", 1.0, criterion_exponent("zd_lower", K=2, d=1)))
    except CriterionDegenerateError:
        degenerate_raises = True

    p = criterion_exponent(cfg.exponent_kind, K=cfg.K, d=cfg.d)
    configured = series_classify(SeriesCriterion(cfg.family, cfg.family_param, p))
    rows.append(_row(name, f"classification_{configured}", 1.0, target=None))
    rows.append(_row(name, "grid_disagreements", disagreements, target=0.0, passed=disagreements == 0))
    verdicts = [
        Verdict(name="series_ground_truth", claim="classification matches geometric and p-series reductions",
                passed=disagreements == 0, statistic=float(disagreements), threshold=0.0),
        Verdict(name="series_degenerate", claim="nonpositive exponents are rejected",
                passed=degenerate_raises),
    ]
    return _report(cfg, rows, verdicts)


def _with_hash(report: ExperimentReport, cfg: ExperimentConfig) -> ExperimentReport:
    return report.model_copy(update={"config_hash": config_hash(cfg)})


def _run_collision_growth(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    late_after = cfg.burn_in if cfg.burn_in < cfg.n_max else None
    report = collision_growth_experiment(cfg.graph, cfg.K, cfg.n_max, cfg.replicates, cfg.master_seed,
                                         d=cfg.d, late_after=late_after, engine=cfg.engine, threads=cfg.threads,
                                         rel_tolerance=min(cfg.rel_tolerance, 0.05))
    return _with_hash(report, cfg)


def _run_backbone_coincidence(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    report = backbone_coincidence_experiment(cfg.n_max, cfg.replicates, cfg.master_seed,
                                             engine=cfg.engine, threads=cfg.threads)
    return _with_hash(report, cfg)


def _run_distance_cdf(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    report = distance_cdf_experiment(cfg.d, cfg.K, cfg.n_max, cfg.replicates, cfg.master_seed,
                                     threshold=cfg.ks_ceiling, threads=cfg.threads)
    return _with_hash(report, cfg)


def _run_lower_class(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    report = lower_class_experiment(cfg.n_max, cfg.replicates, cfg.master_seed, cfg.epsilon,
                                    start=min(4096, cfg.n_max), engine=cfg.engine, threads=cfg.threads)
    return _with_hash(report, cfg)


def _run_tail_bounds(cfg: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    full = cfg.scale == "full"
    report = tail_bound_checks(
        cfg.n_max, cfg.replicates, cfg.master_seed,
        delta=cfg.delta,
        local_time_n=10_000 if full else 2_500,
        local_time_replicates=cfg.replicates if full else min(cfg.replicates, 5_000),
        comb_n=4096 if full else 1024,
        comb_replicates=10_000 if full else 500,
        threads=cfg.threads,
    )
    return _with_hash(report, cfg)


RUNNERS: dict[ExperimentKind, Callable[[ExperimentConfig, Path], ExperimentReport]] = {
    ExperimentKind.SIMULATE_ZD: _run_simulate_zd,
    ExperimentKind.SIMULATE_COMB: _run_simulate_comb,
    ExperimentKind.CONSTRUCTION_EQUIVALENCE: _run_construction_equivalence,
    ExperimentKind.KERNEL_TABLE: _run_kernel_table,
    ExperimentKind.REVERSIBILITY: _run_reversibility,
    ExperimentKind.BACKBONE_RETURN: _run_backbone_return,
    ExperimentKind.VERTICAL_PROFILE: _run_vertical_profile,
    ExperimentKind.TOOTH_KERNEL: _run_tooth_kernel,
    ExperimentKind.FIXED_VERTEX: _run_fixed_vertex,
    ExperimentKind.GREEN_FUNCTION: _run_green_function,
    ExperimentKind.HITTING_TIME: _run_hitting_time,
    ExperimentKind.DK_LIMIT_CDF: _run_dk_limit_cdf,
    ExperimentKind.DISTANCE_ORACLE: _run_distance_oracle,
    ExperimentKind.LIL_PROFILE: _run_lil_profile,
    ExperimentKind.SERIES_CLASSIFY: _run_series_classify,
    ExperimentKind.COLLISION_GROWTH: _run_collision_growth,
    ExperimentKind.BACKBONE_COINCIDENCE: _run_backbone_coincidence,
    ExperimentKind.DISTANCE_CDF: _run_distance_cdf,
    ExperimentKind.LOWER_CLASS: _run_lower_class,
    ExperimentKind.TAIL_BOUNDS: _run_tail_bounds,
}


# --- artifacts ---------------------------------------------------------------


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: list[ReportRow], path: Path) -> None:
    """Rows in CSV_COLUMNS order, preceded by a schema comment."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema_version={CSV_SCHEMA_VERSION}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_format_cell(data[col]) for col in CSV_COLUMNS])


def write_json(payload: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
        f.write("\n")


def execute(config: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    """Run one config and stamp the wall time on its report."""
    logger.info(f"Running {config.kind.value} (seed={config.master_seed}, threads={config.threads})")
    started = time.perf_counter()
    report = RUNNERS[config.kind](config, out_dir)
    elapsed = time.perf_counter() - started
    logger.info(f"Finished {config.kind.value} in {elapsed * 1000:.0f}ms")
    for verdict in report.verdicts:
        if not verdict.passed:
            logger.warning(f"Verdict failed: {verdict.name} ({verdict.claim})")
    return report.model_copy(update={"wall_time_s": round(elapsed, 3)})


def run(config: ExperimentConfig, out_dir: Path, fmt: str = "both") -> RunOutcome:
    """
    Execute a config and write its artifacts.

    Args:
        config: Validated config
        out_dir: Directory for artifacts
        fmt: csv, json or both

    Returns:
        RunOutcome with the report and written paths
    """
    report = execute(config, out_dir)
    stem = config.kind.value
    paths = []
    if fmt in ("csv", "both"):
        paths.append(out_dir / f"{stem}.csv")
        write_csv(report.rows, paths[-1])
    if fmt in ("json", "both"):
        paths.append(out_dir / f"{stem}.json")
        write_json({**report.model_dump(mode="json"), "config": to_canonical(config)}, paths[-1])
    return RunOutcome(report=report, paths=paths)


# --- verify-all --------------------------------------------------------------


def verification_suite(scale: str = "quick", seed: int = 20240601, threads: int = 1) -> list[ExperimentConfig]:
    """Configs covering every acceptance check, at smoke or full size."""
    full = scale == "full"

    def cfg(kind: str, **kwargs) -> ExperimentConfig:
        return ExperimentConfig(kind=kind, master_seed=seed, threads=threads, scale=scale, **kwargs)

    lil_n = 1_000_000 if full else 2**14
    lil_reps = 200 if full else 50
    lil_burn = 2**14 if full else 2**10
    return [
        cfg("hitting_time", level_r=5, replicates=1_000_000 if full else 20_000, n_max=4096 if full else 1024),
        cfg("dk_limit_cdf", K=2, replicates=100_000 if full else 20_000),
        cfg("distance_cdf", d=1, K=2, n_max=10_000, replicates=100_000 if full else 20_000),
        cfg("distance_cdf", d=1, K=3, n_max=10_000, replicates=100_000 if full else 20_000),
        cfg("reversibility", n_max=512 if full else 64, k_max=20 if full else 10),
        cfg("backbone_return", n_max=4096 if full else 512),
        cfg("green_function", z=0.5, n_max=256),
        cfg("vertical_profile", n_max=2048 if full else 256),
        cfg("tooth_kernel", n_max=2048 if full else 1024, level_r=8),
        cfg("fixed_vertex", n_max=2048 if full else 1024),
        cfg("lil_profile", graph="zd", statistic="dk", K=2, n_max=lil_n, replicates=lil_reps, burn_in=lil_burn),
        cfg("lil_profile", graph="comb", statistic="c2", K=1, n_max=lil_n, replicates=lil_reps, burn_in=lil_burn),
        cfg("lil_profile", graph="comb", statistic="dk", K=2, n_max=lil_n, replicates=lil_reps, burn_in=lil_burn),
        cfg("lil_profile", graph="comb", statistic="c1", K=1, n_max=lil_n, replicates=lil_reps, burn_in=lil_burn),
        cfg("collision_growth", graph="zd", K=3, n_max=1_000_000 if full else 2**14, replicates=200 if full else 50,
            burn_in=10_000 if full else 2**10),
        cfg("collision_growth", graph="zd", K=2, n_max=1_000_000 if full else 2**14, replicates=200 if full else 50,
            burn_in=10_000 if full else 2**10),
        cfg("collision_growth", graph="comb", K=2, n_max=1_000_000 if full else 2**14,
            replicates=200 if full else 50, burn_in=10_000 if full else 2**12),
        cfg("backbone_coincidence", n_max=1_000_000 if full else 2**14, replicates=200 if full else 50),
        cfg("lower_class", n_max=1_000_000 if full else 2**14, replicates=10_000 if full else 100, epsilon=0.05),
        cfg("series_classify", exponent_kind="zd_lower", K=2, d=3, family="logpower", family_param=2.0),
        cfg("construction_equivalence", n_max=64, replicates=100_000 if full else 5_000),
        cfg("distance_oracle", k_max=8),
        cfg("tail_bounds", n_max=400, replicates=1_000_000 if full else 20_000, delta=0.5),
    ]


def verify_all(out_dir: Path, scale: str = "quick", seed: int = 20240601, threads: int = 1,
               fmt: str = "both") -> RunOutcome:
    """Run the whole suite into one CSV and one JSON summary."""
    configs = verification_suite(scale, seed, threads)
    reports = []
    for i, config in enumerate(configs, start=1):
        logger.info(f"[{i}/{len(configs)}] {config.kind.value}")
        reports.append(execute(config, out_dir))

    rows = [row for report in reports for row in report.rows]
    verdicts = [verdict.model_copy(update={"name": f"{report.experiment}:{verdict.name}"})
                for report in reports for verdict in report.verdicts]
    suite_hash = json.dumps([config_hash(c) for c in configs])
    combined = ExperimentReport(
        experiment="verify_all",
        config_hash=hashlib.sha256(suite_hash.encode("utf-8")).hexdigest(),
        master_seed=seed,
        rows=rows,
        verdicts=verdicts,
        wall_time_s=round(sum(r.wall_time_s or 0.0 for r in reports), 3),
    )

    paths = []
    if fmt in ("csv", "both"):
        paths.append(out_dir / "verify_all.csv")
        write_csv(rows, paths[-1])
    if fmt in ("json", "both"):
        paths.append(out_dir / "verify_all.json")
        write_json({**combined.model_dump(mode="json"),
                    "reports": [r.model_dump(mode="json", exclude={"rows"}) for r in reports]}, paths[-1])
    return RunOutcome(report=combined, paths=paths)
