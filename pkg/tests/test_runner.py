"""Tests for run dispatch and artifact writing."""

import json

import pytest

from app.config import config_hash, precondition_violations
from app.models import VERDICT_ANCHORS, ExperimentConfig, ExperimentKind, Verdict
from app.runner import RUNNERS, execute, run, verification_suite
from app.settings import GOLDEN_DIR


class TestDispatch:
    """Every kind has a runner."""

    def test_all_kinds_registered(self):
        assert set(RUNNERS) == set(ExperimentKind)


class TestArtifacts:
    """Tests for CSV and JSON output."""

    def test_csv_header_matches_golden(self, tmp_path):
        config = ExperimentConfig(kind="distance_oracle", k_max=2)
        outcome = run(config, tmp_path, "csv")
        assert outcome.paths == [tmp_path / "distance_oracle.csv"]
        lines = outcome.paths[0].read_text(encoding="utf-8").splitlines()
        golden = (GOLDEN_DIR / "csv_header.txt").read_text(encoding="utf-8").splitlines()
        assert lines[:2] == golden
        assert len(lines) == 2 + len(outcome.report.rows)

    def test_json_carries_provenance(self, tmp_path):
        config = ExperimentConfig(kind="distance_oracle", k_max=2, master_seed=7)
        outcome = run(config, tmp_path, "json")
        payload = json.loads(outcome.paths[0].read_text(encoding="utf-8"))
        assert payload["config_hash"] == config_hash(config)
        assert payload["master_seed"] == 7
        assert "kind = distance_oracle" in payload["config"]
        assert payload["wall_time_s"] is not None

    def test_both_formats(self, tmp_path):
        outcome = run(ExperimentConfig(kind="distance_oracle", k_max=1), tmp_path)
        assert [p.suffix for p in outcome.paths] == [".csv", ".json"]
        assert all(p.exists() for p in outcome.paths)

    def test_json_verdicts_carry_anchor(self, tmp_path):
        for config in (ExperimentConfig(kind="distance_oracle", k_max=2), ExperimentConfig(kind="kernel_table", n_max=6)):
            outcome = run(config, tmp_path, "json")
            payload = json.loads(outcome.paths[0].read_text(encoding="utf-8"))
            assert payload["verdicts"]
            for verdict in payload["verdicts"]:
                assert verdict["anchor"]
                assert verdict["anchor"] == VERDICT_ANCHORS[verdict["name"]]

    @pytest.mark.parametrize("kind", ["collision_growth", "lil_profile"])
    def test_csv_independent_of_threads(self, tmp_path, kind):
        outputs = []
        for threads in (1, 8):
            config = ExperimentConfig(kind=kind, graph="comb", n_max=1024, replicates=8, burn_in=64, threads=threads)
            outcome = run(config, tmp_path / f"t{threads}", "csv")
            outputs.append(outcome.paths[0].read_bytes())
        assert outputs[0] == outputs[1]


class TestVerdictAnchor:
    """Every verdict names the result it checks."""

    def test_anchor_filled_from_name(self):
        verdict = Verdict(name="kernel_mass", claim="mass is one", passed=True)
        assert verdict.anchor == "comb heat kernel"

    def test_explicit_anchor_kept(self):
        assert Verdict(name="custom", claim="x", passed=True, anchor="ad hoc").anchor == "ad hoc"

    def test_unregistered_name_rejected(self):
        with pytest.raises(ValueError):
            Verdict(name="unregistered", claim="x", passed=True)

    def test_rename_keeps_anchor(self):
        verdict = Verdict(name="lil_band", claim="x", passed=True)
        renamed = verdict.model_copy(update={"name": "lil_profile:lil_band"})
        assert renamed.anchor == "law of the iterated logarithm"


class TestExactRuns:
    """Exact runs pass on small inputs."""

    def test_kernel_table(self, tmp_path):
        outcome = run(ExperimentConfig(kind="kernel_table", n_max=6), tmp_path)
        assert outcome.exit_code == 0
        assert (tmp_path / "kernel_0_0_n6.txt").exists()

    def test_distance_oracle(self, tmp_path):
        report = execute(ExperimentConfig(kind="distance_oracle", k_max=3), tmp_path)
        assert report.passed
        assert report.rows[0].value == 0.0

    def test_reversibility(self, tmp_path):
        report = execute(ExperimentConfig(kind="reversibility", n_max=16, k_max=4), tmp_path)
        assert report.passed

    def test_series_classify(self, tmp_path):
        config = ExperimentConfig(kind="series_classify", exponent_kind="zd_lower", K=2, d=3,
                                  family="logpower", family_param=2.0)
        report = execute(config, tmp_path)
        assert report.passed
        assert report.rows[0].statistic_name == "classification_convergent"


class TestSuite:
    """Tests for the verify-all suite."""

    @pytest.mark.parametrize("scale", ["quick", "full"])
    def test_configs_are_valid(self, scale):
        configs = verification_suite(scale)
        assert configs
        for config in configs:
            assert precondition_violations(config) == [], config.kind

    def test_covers_every_kind_but_simulation(self):
        kinds = {c.kind for c in verification_suite("quick")}
        missing = set(ExperimentKind) - kinds
        assert missing <= {ExperimentKind.SIMULATE_ZD, ExperimentKind.SIMULATE_COMB, ExperimentKind.KERNEL_TABLE}

    def test_seed_and_threads_propagate(self):
        configs = verification_suite("quick", seed=5, threads=3)
        assert all(c.master_seed == 5 and c.threads == 3 for c in configs)

    def test_execute_is_deterministic(self, tmp_path):
        config = ExperimentConfig(kind="construction_equivalence", n_max=6, replicates=300, master_seed=11)
        assert execute(config, tmp_path).rows == execute(config, tmp_path).rows
