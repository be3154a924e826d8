"""Pydantic models for run configuration, statistical tests and reports."""

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from app.rng import MASK64


class ExperimentKind(str, Enum):
    """Everything the toolkit can run, grouped by CLI subcommand."""

    # simulate
    SIMULATE_ZD = "simulate_zd"
    SIMULATE_COMB = "simulate_comb"
    CONSTRUCTION_EQUIVALENCE = "construction_equivalence"
    # exact
    KERNEL_TABLE = "kernel_table"
    REVERSIBILITY = "reversibility"
    BACKBONE_RETURN = "backbone_return"
    VERTICAL_PROFILE = "vertical_profile"
    TOOTH_KERNEL = "tooth_kernel"
    FIXED_VERTEX = "fixed_vertex"
    GREEN_FUNCTION = "green_function"
    HITTING_TIME = "hitting_time"
    DK_LIMIT_CDF = "dk_limit_cdf"
    DISTANCE_ORACLE = "distance_oracle"
    # experiment
    LIL_PROFILE = "lil_profile"
    SERIES_CLASSIFY = "series_classify"
    COLLISION_GROWTH = "collision_growth"
    BACKBONE_COINCIDENCE = "backbone_coincidence"
    DISTANCE_CDF = "distance_cdf"
    LOWER_CLASS = "lower_class"
    TAIL_BOUNDS = "tail_bounds"


SUBCOMMAND_KINDS: dict[str, set[ExperimentKind]] = {
    "simulate": {
        ExperimentKind.SIMULATE_ZD,
        ExperimentKind.SIMULATE_COMB,
        ExperimentKind.CONSTRUCTION_EQUIVALENCE,
    },
    "exact": {
        ExperimentKind.KERNEL_TABLE,
        ExperimentKind.REVERSIBILITY,
        ExperimentKind.BACKBONE_RETURN,
        ExperimentKind.VERTICAL_PROFILE,
        ExperimentKind.TOOTH_KERNEL,
        ExperimentKind.FIXED_VERTEX,
        ExperimentKind.GREEN_FUNCTION,
        ExperimentKind.HITTING_TIME,
        ExperimentKind.DK_LIMIT_CDF,
        ExperimentKind.DISTANCE_ORACLE,
    },
    "experiment": {
        ExperimentKind.LIL_PROFILE,
        ExperimentKind.SERIES_CLASSIFY,
        ExperimentKind.COLLISION_GROWTH,
        ExperimentKind.BACKBONE_COINCIDENCE,
        ExperimentKind.DISTANCE_CDF,
        ExperimentKind.LOWER_CLASS,
        ExperimentKind.TAIL_BOUNDS,
    },
}


class ExperimentConfig(BaseModel):
    """Validated run configuration."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    kind: ExperimentKind
    graph: Literal["zd", "comb"] = "zd"
    d: int = Field(1, ge=1, description="Dimension of Z^d")
    K: int = Field(2, ge=1, description="Number of walkers")
    n_max: int = Field(4096, ge=0, description="Steps (or largest checkpoint)")
    replicates: int = Field(200, ge=1)
    master_seed: int = Field(20240601, ge=0, le=MASK64)
    threads: int = Field(1, ge=1)
    engine: Literal["direct", "constructed"] = "constructed"
    statistic: Literal["dk", "norm", "c1", "c2"] = "dk"
    burn_in: int = Field(1024, ge=16)
    epsilon: float = Field(0.05, gt=0.0, lt=0.5)
    delta: float = Field(0.5, gt=0.0)
    k_max: int | None = Field(None, ge=0)
    level_r: int = Field(5, ge=1, description="Hitting level r")
    u: float = Field(1.0, gt=0.0)
    z: float = Field(0.5, ge=0.0)
    start_x: int = 0
    start_y: int = 0
    family: Literal["power", "logpower", "custom"] = "logpower"
    family_param: float = Field(1.0, ge=0.0)
    exponent_kind: Literal["zd_lower", "comb_lower", "single_walker"] = "zd_lower"
    p_value_floor: float = Field(1e-3, gt=0.0, lt=1.0)
    ks_ceiling: float = Field(0.02, gt=0.0)
    rel_tolerance: float = Field(0.1, gt=0.0)
    band_low: float | None = None
    band_high: float | None = None
    scale: Literal["quick", "full"] = "quick"


class StatTest(BaseModel):
    """Outcome of one statistical test; the verdict depends only on decision value and threshold."""

    kind: Literal["chi_square_gof", "chi_square_two_sample", "ks", "ks_two_sample", "slope_fit"]
    statistic: float
    p_value: float | None = None
    decision_value: float
    threshold: float
    comparator: Literal["ge", "gt", "le", "lt"]
    detail: str | None = None

    @computed_field  # type: ignore[misc]
    @property
    def verdict(self) -> bool:
        v, t = self.decision_value, self.threshold
        return {"ge": v >= t, "gt": v > t, "le": v <= t, "lt": v < t}[self.comparator]


class ReportRow(BaseModel):
    """One CSV row."""

    experiment: str
    checkpoint_n: int | None = None
    replicate_count: int
    statistic_name: str
    value: float
    target: float | None = None
    tolerance: float | None = None
    verdict: Literal["pass", "fail", "info"] = "info"


# Result each verdict traces back to, keyed by verdict name
VERDICT_ANCHORS: dict[str, str] = {
    # walks
    "mean_square_displacement": "diffusive scaling of the simple walk",
    "construction_equivalence": "comb walk from backbone walk, tooth walk and geometric runs",
    "step_balance": "comb walk from backbone walk, tooth walk and geometric runs",
    "backbone_frequency": "backbone return probability",
    # exact kernel
    "kernel_mass": "comb heat kernel",
    "kernel_support": "comb heat kernel",
    "comb_distance_closed_form": "comb graph distance",
    "reversibility": "reversibility of the comb walk",
    "backbone_return_asymptotic": "backbone return probability",
    "backbone_return_convergence": "backbone return probability",
    "backbone_genfn_singularity": "backbone return generating function",
    "green_function_series": "comb Green function",
    "vertical_profile_bounded": "vertical heat kernel bound",
    "vertical_profile_peak": "vertical heat kernel bound",
    "tooth_kernel_shape": "heat kernel along a tooth",
    "fixed_vertex_limit": "heat kernel at a fixed vertex",
    # passage laws
    "hitting_pmf_exact": "first-passage law of the simple walk",
    "hitting_pmf_fit": "first-passage law of the simple walk",
    "hitting_limit": "first-passage scaling limit",
    "limit_cdf_quadrature": "limit law of the rescaled diameter",
    "limit_cdf_pair_closed_form": "limit law of the rescaled diameter",
    "limit_cdf_monotone_in_K": "limit law of the rescaled diameter",
    "distance_cdf_ks": "limit law of the rescaled diameter",
    # almost-sure behaviour
    "lil_band": "law of the iterated logarithm",
    "running_max_monotone": "law of the iterated logarithm",
    "series_ground_truth": "lower-class series criterion",
    "series_degenerate": "lower-class series criterion",
    "close_different_teeth_decay": "lower class of the comb pair distance",
    "liminf_event_reached": "lower class of the comb pair distance",
    "final_distance_large": "lower class of the comb pair distance",
    "full_collisions_grow": "collisions of independent walkers",
    "late_collisions_vanish": "collisions of independent walkers",
    "pairwise_mean_exact": "collisions of independent walkers",
    "coincidence_rate": "simultaneous backbone visits",
    "coincidence_growth": "simultaneous backbone visits",
    "coincidence_monotone": "simultaneous backbone visits",
    # tail bounds
    "geometric_partial_sum_tail": "tail bounds for geometric sums",
    "geometric_sum_tail": "tail bounds for geometric sums",
    "local_time_tail": "tail of the local time at zero",
    "horizontal_steps_tail": "tail of the horizontal step count",
    "horizontal_range_tail": "tail of the horizontal range",
}


class Verdict(BaseModel):
    """Pass/fail outcome of one checked claim."""

    name: str
    claim: str
    passed: bool
    statistic: float | None = None
    threshold: float | None = None
    detail: str = ""
    anchor: str = ""

    @model_validator(mode="after")
    def _fill_anchor(self) -> "Verdict":
        if not self.anchor:
            anchor = VERDICT_ANCHORS.get(self.name)
            if anchor is None:
                raise ValueError(f"no anchor registered for verdict {self.name!r}")
            self.anchor = anchor
        return self


class ExperimentReport(BaseModel):
    """Rows and verdicts of one run, with provenance."""

    experiment: str
    config_hash: str
    master_seed: int
    rows: list[ReportRow] = Field(default_factory=list)
    verdicts: list[Verdict] = Field(default_factory=list)
    wall_time_s: float | None = None

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)
