"""
Experiment config files.

A config is a flat `key = value` document; `#` starts a comment and blank
lines are ignored. Parsing collects every violation (syntax, unknown keys,
field constraints and per-experiment preconditions) before failing.
"""

import hashlib
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app.errors import ConfigError
from app.models import ExperimentConfig, ExperimentKind

# Experiments that measure distances between walkers
DISTANCE_KINDS = {
    ExperimentKind.DISTANCE_CDF,
    ExperimentKind.COLLISION_GROWTH,
    ExperimentKind.LOWER_CLASS,
    ExperimentKind.DK_LIMIT_CDF,
}

LIL_STATISTICS = {"zd": {"dk", "norm"}, "comb": {"dk", "c1", "c2"}}


def _parse_lines(text: str) -> tuple[dict[str, str], list[str]]:
    values: dict[str, str] = {}
    problems: list[str] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {number}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            problems.append(f"line {number}: missing key")
        elif key in values:
            problems.append(f"{key}: duplicate key on line {number}")
        else:
            values[key] = value
    return values, problems


def _format_error(error: dict[str, Any]) -> str:
    field = ".".join(str(part) for part in error["loc"]) or "config"
    if error["type"] == "extra_forbidden":
        return f"{field}: unknown key"
    return f"{field}: {error['msg']}"


def precondition_violations(config: ExperimentConfig) -> list[str]:
    """Cross-field checks that depend on the experiment kind."""
    kind = config.kind
    problems = []
    if kind in DISTANCE_KINDS and config.K < 2:
        problems.append(f"K: {kind.value} needs K >= 2, got {config.K}")
    if kind is ExperimentKind.LIL_PROFILE:
        if config.statistic == "dk" and config.K < 2:
            problems.append(f"K: distance statistics need K >= 2, got {config.K}")
        if config.statistic not in LIL_STATISTICS[config.graph]:
            problems.append(f"statistic: {config.statistic!r} is not defined on graph {config.graph!r}")
        if config.n_max < 1000:
            problems.append(f"n_max: log log normalizers need n_max >= 1000, got {config.n_max}")
        if config.burn_in >= config.n_max:
            problems.append(f"burn_in: must be below n_max={config.n_max}, got {config.burn_in}")
    if kind is ExperimentKind.VERTICAL_PROFILE and config.k_max is not None:
        if config.k_max > config.n_max**0.45:
            problems.append(f"k_max: must be <= n_max^0.45 = {config.n_max**0.45:.2f}, got {config.k_max}")
    if kind is ExperimentKind.TOOTH_KERNEL:
        if config.n_max % 2 or config.level_r % 2:
            problems.append("level_r: tooth kernel needs even n_max and even level_r")
        if config.level_r >= config.n_max:
            problems.append(f"level_r: must be below n_max={config.n_max}, got {config.level_r}")
    if kind is ExperimentKind.LOWER_CLASS and not config.epsilon < 0.125:
        problems.append(f"epsilon: lower-class experiment needs epsilon < 1/8, got {config.epsilon}")
    if kind is ExperimentKind.COLLISION_GROWTH and config.n_max < 2:
        problems.append(f"n_max: collision growth needs n_max >= 2, got {config.n_max}")
    if config.band_low is not None and config.band_high is not None and config.band_low > config.band_high:
        problems.append("band_low: must not exceed band_high")
    return problems


def parse_config_text(text: str, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """
    Validate config text, with optional overrides applied on top.

    Raises:
        ConfigError: Listing every violation found
    """
    values, problems = _parse_lines(text)
    data: dict[str, Any] = {**values, **{k: v for k, v in (overrides or {}).items() if v is not None}}

    config = None
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        problems.extend(_format_error(err) for err in e.errors())

    if config is not None:
        problems.extend(precondition_violations(config))
    if problems:
        raise ConfigError(problems)
    return config


def parse_config(path: Path | str, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Read and validate a config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config: file not found: {path}"])
    return parse_config_text(path.read_text(encoding="utf-8"), overrides)


def to_canonical(config: ExperimentConfig) -> str:
    """Sorted `key = value` lines; unset optional fields are omitted."""
    lines = []
    for key, value in sorted(config.model_dump(mode="json").items()):
        if value is None:
            continue
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical text."""
    return hashlib.sha256(to_canonical(config).encode("utf-8")).hexdigest()
