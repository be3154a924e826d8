"""Integration tests for the combwalk command line."""

import pytest

from app.main import EXIT_GUARD, EXIT_PASS, EXIT_USAGE, build_parser, main


@pytest.fixture
def write_config(tmp_path):
    """Write a config file and return its path."""
    def _write(text: str, name: str = "run.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


class TestExactCommand:
    """Tests for the exact subcommand."""

    def test_kernel_table_passes(self, tmp_path, write_config, capsys):
        config = write_config("kind = kernel_table\nn_max = 6\n")
        out = tmp_path / "out"
        assert main(["exact", "--config", str(config), "--out", str(out)]) == EXIT_PASS
        assert (out / "kernel_table.csv").exists()
        assert (out / "kernel_table.json").exists()
        assert (out / "kernel_0_0_n6.txt").exists()
        printed = capsys.readouterr().out
        assert "[PASS] kernel_mass" in printed
        assert "2/2 verdicts passed" in printed

    def test_format_flag(self, tmp_path, write_config):
        config = write_config("kind = distance_oracle\nk_max = 2\n")
        out = tmp_path / "out"
        assert main(["exact", "--config", str(config), "--out", str(out), "--format", "json"]) == EXIT_PASS
        assert not (out / "distance_oracle.csv").exists()
        assert (out / "distance_oracle.json").exists()

    def test_guard_exit_code(self, tmp_path, write_config, monkeypatch, capsys):
        monkeypatch.setenv("COMBWALK_DP_GUARD", "4")
        config = write_config("kind = kernel_table\nn_max = 6\n")
        assert main(["exact", "--config", str(config), "--out", str(tmp_path)]) == EXIT_GUARD
        assert "resource guard" in capsys.readouterr().err


class TestUsageErrors:
    """Bad input exits with the usage code."""

    def test_wrong_subcommand(self, tmp_path, write_config, capsys):
        config = write_config("kind = kernel_table\nn_max = 6\n")
        assert main(["simulate", "--config", str(config), "--out", str(tmp_path)]) == EXIT_USAGE
        assert "does not belong to the 'simulate' subcommand" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["exact", "--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_unknown_key(self, tmp_path, write_config, capsys):
        config = write_config("kind = kernel_table\ncolour = blue\n")
        assert main(["exact", "--config", str(config), "--out", str(tmp_path)]) == EXIT_USAGE
        assert "config error: colour: unknown key" in capsys.readouterr().err

    def test_degenerate_series(self, tmp_path, write_config):
        config = write_config("kind = series_classify\nexponent_kind = zd_lower\nK = 2\nd = 1\n")
        assert main(["experiment", "--config", str(config), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_zero_threads_rejected(self, tmp_path, write_config):
        config = write_config("kind = distance_oracle\nk_max = 2\n")
        assert main(["exact", "--config", str(config), "--out", str(tmp_path), "--threads", "0"]) == EXIT_USAGE
        assert not (tmp_path / "distance_oracle.csv").exists()

    def test_config_is_required(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["exact"])
        assert excinfo.value.code == 2


class TestParser:
    """Tests for flag parsing."""

    def test_seed_override(self, tmp_path, write_config):
        args = build_parser().parse_args(["simulate", "--config", "x.cfg", "--seed", "9", "--threads", "2"])
        assert args.seed == 9
        assert args.threads == 2
        assert args.format == "both"

    def test_verify_all_scale(self):
        args = build_parser().parse_args(["verify-all", "--scale", "full"])
        assert args.command == "verify-all"
        assert args.scale == "full"
        assert args.seed is None

    def test_rejects_unknown_scale(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["verify-all", "--scale", "huge"])
