"""Tests for CLI interface."""

import json
import os
from collections.abc import Iterator
from unittest.mock import MagicMock, patch

import pytest
import typer.testing

from mskit import __version__
from mskit.checks import CheckResult
from mskit.interfaces.cli import EXIT_FAIL, EXIT_USAGE, app
from mskit.records import ReportRecord
from mskit.services.config_service import ConfigServiceImpl
from mskit.services.scenario_service import ScenarioServiceImpl
from mskit.services.selftest_service import SelftestServiceImpl

MONOMIAL_2 = '{"type": "monomial", "n": 2, "d": 1}'
MONOMIAL_1 = '{"type": "monomial", "n": 1, "d": 1}'


@pytest.fixture(autouse=True)
def cli_services(config_service: ConfigServiceImpl) -> Iterator[ConfigServiceImpl]:
    """Point the command-line module at a throwaway configuration and keep logging untouched."""
    with (
        patch("mskit.interfaces.cli.configure_logging"),
        patch("mskit.interfaces.cli.config_service", config_service),
        patch("mskit.interfaces.cli.scenario_service", ScenarioServiceImpl(config_service)),
        patch("mskit.interfaces.cli.selftest_service", SelftestServiceImpl(config_service)),
    ):
        yield config_service


class TestCLI:
    """Test cases for CLI interface."""

    def setup_method(self) -> None:
        """Set up test environment before each test."""
        self.runner = typer.testing.CliRunner()

    def test_no_args_shows_help(self) -> None:
        result = self.runner.invoke(app, [])

        assert "Usage" in result.output
        assert "selftest" in result.output

    def test_version(self) -> None:
        result = self.runner.invoke(app, ["version"])

        assert result.exit_code == 0
        assert result.stdout.strip() == f"mskit {__version__}"

    def test_schema(self) -> None:
        result = self.runner.invoke(app, ["schema"])

        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert set(payload) == {"report", "scenario"}
        assert "tasks" in payload["scenario"]["required"]

    def test_list_scenarios(self) -> None:
        result = self.runner.invoke(app, ["list"])

        assert result.exit_code == 0
        assert "minimal_dim" in result.stdout
        assert "basis, tto, dim" in result.stdout

    def test_list_checks_of_module(self) -> None:
        result = self.runner.invoke(app, ["list", "--checks", "--module", "matops"])

        assert result.exit_code == 0
        assert "matops.hermitian_sqrt" in result.stdout
        assert "tto." not in result.stdout

    @patch("mskit.interfaces.cli.selftest_service")
    def test_list_checks_unknown_module(self, mock_selftest: MagicMock) -> None:
        mock_selftest.list_checks.return_value = {}

        result = self.runner.invoke(app, ["list", "--checks", "--module", "plotting"])

        assert result.exit_code == 0
        assert "No checks for module 'plotting'" in result.stdout


class TestRunCommand:
    """Test cases for the run command."""

    def setup_method(self) -> None:
        self.runner = typer.testing.CliRunner()

    def test_run_bundled_scenario(self) -> None:
        """Test that stdout carries exactly the JSONL report."""
        result = self.runner.invoke(app, ["run", "minimal_dim"])

        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["task"] == "dim"
        assert record["verdict"] == "pass"
        assert record["metrics"]["computed"] == 2
        assert "1 record(s), 0 failed" in result.stderr

    def test_run_to_file(self, temp_config_dir: str) -> None:
        out = os.path.join(temp_config_dir, "report.jsonl")

        result = self.runner.invoke(app, ["run", "minimal_dim", "--out", out, "--quiet"])

        assert result.exit_code == 0
        assert result.stdout == ""
        with open(out, encoding="utf-8") as f:
            assert json.loads(f.readline())["scenario"] == "minimal_dim"

    def test_seed_override(self) -> None:
        result = self.runner.invoke(app, ["run", "minimal_dim", "--seed", "17"])

        assert json.loads(result.stdout)["instance"]["seed"] == 17

    @pytest.mark.parametrize(
        "args",
        [
            ["run", "no_such_scenario"],
            ["run", "minimal_dim", "--tol", "gram_tol=-1"],
            ["run", "minimal_dim", "--tol", "nonsense"],
            ["run", "minimal_dim", "--tol", "colour=1e-3"],
            ["run", "minimal_dim", "--grid", "100"],
        ],
    )
    def test_usage_errors_write_no_report(self, args: list[str]) -> None:
        result = self.runner.invoke(app, args)

        assert result.exit_code == EXIT_USAGE
        assert result.stdout == ""
        assert "❌" in result.stderr

    def test_malformed_scenario(self, temp_config_dir: str) -> None:
        path = os.path.join(temp_config_dir, "broken.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write('{"d": 1,,}')

        result = self.runner.invoke(app, ["run", path])

        assert result.exit_code == EXIT_USAGE
        assert result.stdout == ""
        assert "line 1" in result.stderr

    def test_failing_task_exits_one(self) -> None:
        scenario_service = MagicMock()
        scenario_service.run_many.return_value = [
            [
                ReportRecord(task="dim", scenario="s", seed=0, digest="x"),
                ReportRecord(task="tto", scenario="s", seed=0, digest="x", verdict="fail", error="boom"),
            ]
        ]

        with patch("mskit.interfaces.cli.scenario_service", scenario_service):
            result = self.runner.invoke(app, ["run", "s"])

        assert result.exit_code == EXIT_FAIL
        assert len(result.stdout.splitlines()) == 2
        assert "Failed: s/tto" in result.stderr

    def test_workers_default_from_config(self, cli_services: ConfigServiceImpl) -> None:
        cli_services.set_workers(3)
        scenario_service = MagicMock()
        scenario_service.run_many.return_value = []

        with patch("mskit.interfaces.cli.scenario_service", scenario_service):
            result = self.runner.invoke(app, ["run", "a", "b"])

        assert result.exit_code == 0
        assert scenario_service.run_many.call_args.kwargs["workers"] == 3


class TestDimCommand:
    """Test cases for the dim command."""

    def setup_method(self) -> None:
        self.runner = typer.testing.CliRunner()

    def test_dim(self) -> None:
        result = self.runner.invoke(app, ["dim", "--theta1", MONOMIAL_2, "--theta2", MONOMIAL_1, "--grid", "256"])

        assert result.exit_code == 0
        record = json.loads(result.stdout)
        assert record["scenario"] == "cli"
        assert record["metrics"]["computed"] == 2
        assert record["metrics"]["paper_formula"] == 2
        assert record["metrics"]["column_formula"] == 2
        assert "power_formula" not in record["metrics"]

    def test_dim_uses_configured_tolerances(self, cli_services: ConfigServiceImpl) -> None:
        cli_services.set_tolerance("eps_strict", 0.6)
        bp = '{"type": "bp", "d": 1, "factors": [{"w": [0.5, 0.0], "P": [[1.0]]}]}'

        result = self.runner.invoke(app, ["dim", "--theta1", bp, "--theta2", MONOMIAL_1, "--grid", "256"])

        assert result.exit_code == EXIT_USAGE
        assert "Inner function is not pure" in result.stderr
        assert result.stdout == ""

    def test_dim_bad_json(self) -> None:
        result = self.runner.invoke(app, ["dim", "--theta1", "{type: monomial}", "--theta2", MONOMIAL_1])

        assert result.exit_code == EXIT_USAGE
        assert result.stdout == ""

    def test_dim_size_mismatch(self) -> None:
        result = self.runner.invoke(
            app, ["dim", "--theta1", MONOMIAL_2, "--theta2", '{"type": "monomial", "n": 1, "d": 2}', "--grid", "256"]
        )

        assert result.exit_code == EXIT_USAGE
        assert "expected equal sizes" in result.stderr


class TestSelftestCommand:
    """Test cases for the selftest command."""

    def setup_method(self) -> None:
        self.runner = typer.testing.CliRunner()

    @patch("mskit.interfaces.cli.selftest_service")
    def test_all_pass(self, mock_selftest: MagicMock) -> None:
        mock_selftest.run.return_value = [
            CheckResult(name="matops.rank_invariance", module="matops", passed=True, worst=0.0, tolerance=0.5, instances=5)
        ]

        result = self.runner.invoke(app, ["selftest", "--module", "matops"])

        assert result.exit_code == 0
        mock_selftest.run.assert_called_once_with("quick", "matops")
        assert "matops.rank_invariance" in result.stdout
        assert "All invariants hold" in result.stdout

    @patch("mskit.interfaces.cli.selftest_service")
    def test_failure_lists_seeds(self, mock_selftest: MagicMock) -> None:
        mock_selftest.run.return_value = [
            CheckResult(
                name="tto.adjoint",
                module="tto",
                passed=False,
                worst=1.0,
                tolerance=1e-9,
                instances=5,
                failing_seeds=[1, 3],
                errors=["seed 3: not pure"],
            )
        ]

        result = self.runner.invoke(app, ["selftest", "--level", "full"])

        assert result.exit_code == EXIT_FAIL
        assert "tto.adjoint: failing seeds 1, 3" in result.stdout
        assert "seed 3: not pure" in result.stdout

    @patch("mskit.interfaces.cli.selftest_service")
    def test_fully_skipped_check_fails(self, mock_selftest: MagicMock) -> None:
        mock_selftest.run.return_value = [
            CheckResult(
                name="zerosym.converse",
                module="zerosym",
                passed=False,
                worst=0.0,
                tolerance=1e-8,
                instances=2,
                skipped_seeds=[0, 1],
                errors=["no instance met the hypotheses (2 skipped)"],
            )
        ]

        result = self.runner.invoke(app, ["selftest"])

        assert result.exit_code == EXIT_FAIL
        assert "SKIP" in result.stdout
        assert "zerosym.converse: every instance was skipped" in result.stdout
        assert "All invariants hold" not in result.stdout

    def test_unknown_level(self) -> None:
        result = self.runner.invoke(app, ["selftest", "--level", "extreme"])

        assert result.exit_code == EXIT_USAGE

    def test_matops_module(self) -> None:
        result = self.runner.invoke(app, ["selftest", "--module", "matops", "--quiet"])

        assert result.exit_code == 0
        assert "3 invariants" in result.stdout


class TestConfigCommands:
    """Test cases for the config commands."""

    def setup_method(self) -> None:
        self.runner = typer.testing.CliRunner()

    def test_show(self, cli_services: ConfigServiceImpl) -> None:
        result = self.runner.invoke(app, ["config", "show"])

        assert result.exit_code == 0
        assert cli_services.config_file in result.stdout
        assert "gram_tol" in result.stdout

    def test_set(self, cli_services: ConfigServiceImpl) -> None:
        result = self.runner.invoke(app, ["config", "set", "grid.size", "512"])

        assert result.exit_code == 0
        assert cli_services.get_grid_size() == 512

    @pytest.mark.parametrize("key,value", [("printer.ip", "1"), ("run.seed", "many"), ("tolerances.gram_tol", "0")])
    def test_set_invalid(self, key: str, value: str) -> None:
        result = self.runner.invoke(app, ["config", "set", key, value])

        assert result.exit_code == EXIT_USAGE
        assert "❌" in result.stderr
