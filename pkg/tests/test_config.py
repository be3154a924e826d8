"""Unit tests for config parsing and validation."""

import pytest

from app.config import config_hash, parse_config, parse_config_text, precondition_violations, to_canonical
from app.errors import ConfigError
from app.models import ExperimentConfig, ExperimentKind


class TestParsing:
    """Tests for parse_config_text."""

    def test_valid_config(self):
        text = "# walk on the plane\nkind = simulate_zd\nd = 2\nn_max = 100  # steps\n\nreplicates=10\n"
        config = parse_config_text(text)
        assert config.kind is ExperimentKind.SIMULATE_ZD
        assert config.d == 2
        assert config.n_max == 100
        assert config.replicates == 10

    def test_defaults(self):
        config = parse_config_text("kind = kernel_table")
        assert config.master_seed == 20240601
        assert config.threads == 1
        assert config.k_max is None

    def test_overrides(self):
        config = parse_config_text("kind = simulate_zd\nmaster_seed = 1", {"master_seed": 99, "threads": None})
        assert config.master_seed == 99
        assert config.threads == 1

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_text("kind = simulate_zd\ncolour = blue")
        assert excinfo.value.violations == ["colour: unknown key"]

    def test_collects_every_problem(self):
        text = "kind = simulate_zd\nd = 0\nthis line is wrong\nd = 3\nreplicates = -5\n"
        with pytest.raises(ConfigError) as excinfo:
            parse_config_text(text)
        violations = excinfo.value.violations
        assert any(v.startswith("line 3") for v in violations)
        assert any(v.startswith("d: duplicate key") for v in violations)
        assert any(v.startswith("d:") and "duplicate" not in v for v in violations)
        assert any(v.startswith("replicates:") for v in violations)

    def test_missing_kind(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_text("d = 2")
        assert any(v.startswith("kind:") for v in excinfo.value.violations)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            parse_config_text("kind = teleport")

    def test_seed_range(self):
        with pytest.raises(ConfigError):
            parse_config_text(f"kind = simulate_zd\nmaster_seed = {2**64}")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as excinfo:
            parse_config(tmp_path / "absent.cfg")
        assert "file not found" in excinfo.value.violations[0]

    def test_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("kind = distance_oracle\nk_max = 3\n", encoding="utf-8")
        assert parse_config(path).k_max == 3


class TestPreconditions:
    """Cross-field checks per experiment kind."""

    def test_distance_needs_two_walkers(self):
        with pytest.raises(ConfigError) as excinfo:
            parse_config_text("kind = distance_cdf\nK = 1")
        assert excinfo.value.violations[0].startswith("K:")

    def test_lil_requirements(self):
        config = ExperimentConfig(kind="lil_profile", graph="zd", statistic="c1", n_max=500, burn_in=600)
        problems = precondition_violations(config)
        assert any(p.startswith("statistic:") for p in problems)
        assert any(p.startswith("n_max:") for p in problems)
        assert any(p.startswith("burn_in:") for p in problems)

    def test_lil_single_walker_statistic(self):
        config = ExperimentConfig(kind="lil_profile", graph="comb", statistic="c2", K=1, n_max=4096)
        assert precondition_violations(config) == []

    def test_tooth_kernel_parity(self):
        config = ExperimentConfig(kind="tooth_kernel", n_max=100, level_r=3)
        assert precondition_violations(config)

    def test_vertical_profile_k_max(self):
        config = ExperimentConfig(kind="vertical_profile", n_max=256, k_max=13)
        assert precondition_violations(config)

    def test_lower_class_epsilon(self):
        config = ExperimentConfig(kind="lower_class", epsilon=0.2)
        assert precondition_violations(config)

    def test_band_order(self):
        config = ExperimentConfig(kind="lil_profile", band_low=2.0, band_high=1.0)
        assert "band_low: must not exceed band_high" in precondition_violations(config)


class TestCanonical:
    """Tests for canonical text and hashing."""

    def test_sorted_and_skips_unset(self):
        config = ExperimentConfig(kind="simulate_zd")
        lines = to_canonical(config).splitlines()
        keys = [line.split(" = ")[0] for line in lines]
        assert keys == sorted(keys)
        assert "k_max" not in keys
        assert "kind = simulate_zd" in lines

    def test_hash_is_stable(self):
        a = parse_config_text("kind = simulate_zd\nd = 2")
        b = parse_config_text("d = 2\nkind = simulate_zd\n# reordered")
        assert config_hash(a) == config_hash(b)
        assert len(config_hash(a)) == 64

    def test_hash_tracks_seed(self):
        a = ExperimentConfig(kind="simulate_zd", master_seed=1)
        b = ExperimentConfig(kind="simulate_zd", master_seed=2)
        assert config_hash(a) != config_hash(b)
