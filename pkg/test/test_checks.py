"""Tests for the invariant check framework."""

import math
from unittest.mock import MagicMock, patch

import pytest

from mskit.checks import LEVELS, CheckLoader, CheckRegistry, InvariantCheck, Level
from mskit.checks.base import resolve_level
from mskit.exceptions import CheckError, DimMismatchError
from mskit.operators import crofoot
from mskit.tolerances import Tolerances

TINY = Level(name="tiny", max_d=1, seeds=3, bulk_seeds=3, grid=64)


class MockCheck(InvariantCheck):
    """Mock check returning preset residuals per seed."""

    tolerance_key = "gram_tol"

    def __init__(self, tolerances: Tolerances | None = None, values: list[float | None] | None = None) -> None:
        super().__init__(tolerances)
        self.values: list[float | None] = values if values is not None else [0.0, 1e-12, 1e-10]

    @property
    def name(self) -> str:
        return "mock.residual"

    @property
    def description(self) -> str:
        return "A mock check for testing"

    @property
    def module(self) -> str:
        return "mock"

    def measure(self, level: Level, seed: int) -> float | None:
        value = self.values[seed]
        if value is not None and value < 0:
            raise DimMismatchError("instance could not be built")
        return value


class MockLowerBoundCheck(MockCheck):
    """Mock check that must stay above a fixed threshold."""

    fixed_tolerance = 0.5
    higher_is_better = True

    @property
    def name(self) -> str:
        return "mock.lower_bound"


class TestInvariantCheck:
    """Test cases for InvariantCheck."""

    def test_run_passes(self) -> None:
        """Test a run whose residuals all sit within tolerance."""
        result = MockCheck().run(TINY)

        assert result.passed
        assert result.name == "mock.residual"
        assert result.module == "mock"
        assert result.worst == 1e-10
        assert result.tolerance == Tolerances().gram_tol
        assert result.instances == 3
        assert result.failing_seeds == []
        assert result.runtime_ms >= 0.0

    def test_run_collects_failing_seeds(self) -> None:
        """Test that every seed above tolerance is reported."""
        result = MockCheck(values=[1e-3, 0.0, 1.0]).run(TINY)

        assert not result.passed
        assert result.failing_seeds == [0, 2]
        assert result.worst == 1.0

    def test_nan_fails(self) -> None:
        """Test that a NaN residual never passes."""
        result = MockCheck(values=[0.0, math.nan, 0.0]).run(TINY)

        assert not result.passed
        assert result.failing_seeds == [1]
        assert math.isnan(result.worst)

    def test_mskit_error_marks_seed_failing(self) -> None:
        """Test that an instance raising from the error hierarchy fails its seed."""
        result = MockCheck(values=[0.0, -1.0, 0.0]).run(TINY)

        assert not result.passed
        assert result.failing_seeds == [1]
        assert result.errors == ["seed 1: instance could not be built"]
        assert result.worst == 0.0

    def test_higher_is_better(self) -> None:
        """Test checks whose measure must stay above the tolerance."""
        check = MockLowerBoundCheck(values=[0.9, 0.7, 0.2])
        result = check.run(TINY)

        assert check.passes(0.6)
        assert not check.passes(0.4)
        assert result.worst == 0.2
        assert result.failing_seeds == [2]
        assert result.tolerance == 0.5

    def test_tolerance_follows_overrides(self) -> None:
        """Test that a check reads its threshold from the bound tolerances."""
        check = MockCheck(tolerances=Tolerances().with_overrides({"gram_tol": 1e-13}))
        result = check.run(TINY)

        assert result.tolerance == 1e-13
        assert result.failing_seeds == [2]

    def test_findings_reset_between_runs(self) -> None:
        """Test that findings belong to a single run."""
        check = MockCheck()
        check.add_finding(4, 16.0, 48.0, 0.0)

        assert check.run(TINY).findings == []

        check.add_finding(4, 16.0, 48.0, 0.0)
        assert check._findings[0].verdict == "finding"
        assert check._findings[0].check == "mock.residual"

    def test_skipped_seeds_do_not_count(self) -> None:
        """Test that seeds outside the hypotheses are skipped, not measured."""
        result = MockCheck(values=[None, 0.0, 1e-12]).run(TINY)

        assert result.passed
        assert result.status == "PASS"
        assert result.skipped_seeds == [0]
        assert result.worst == 1e-12

    def test_every_seed_skipped_is_not_a_pass(self) -> None:
        """Test that a run which tests nothing is reported as skipped."""
        result = MockLowerBoundCheck(values=[None, None, None]).run(TINY)

        assert not result.passed
        assert result.all_skipped
        assert result.status == "SKIP"
        assert result.failing_seeds == []
        assert result.skipped_seeds == [0, 1, 2]
        assert result.errors == ["no instance met the hypotheses (3 skipped)"]

    def test_string_forms(self) -> None:
        check = MockCheck()

        assert str(check) == "mock.residual: A mock check for testing"
        assert repr(check) == "InvariantCheck(name='mock.residual', module='mock')"


class TestLevels:
    """Test cases for selftest levels."""

    def test_resolve_by_name(self) -> None:
        assert resolve_level("quick") is LEVELS["quick"]
        assert resolve_level(TINY) is TINY

    def test_full_is_larger_than_quick(self) -> None:
        quick, full = LEVELS["quick"], LEVELS["full"]

        assert full.seeds > quick.seeds
        assert full.max_d > quick.max_d
        assert full.bulk_seeds > quick.bulk_seeds

    def test_unknown_level(self) -> None:
        with pytest.raises(CheckError, match="Unknown selftest level 'extreme'"):
            resolve_level("extreme")


class TestCheckLoader:
    """Test cases for CheckLoader."""

    def test_discover_builtin_checks(self) -> None:
        """Test discovery of the packaged check modules."""
        checks = CheckLoader().discover_checks()

        assert len(checks) == 30
        assert {name.split(".")[0] for name in checks} == {
            "circle_fun",
            "crofoot",
            "inner",
            "matops",
            "model_space",
            "tto",
            "zerosym",
        }
        for name, check_class in checks.items():
            assert check_class().module == name.split(".")[0]

    def test_nonexistent_directory(self, temp_config_dir: str) -> None:
        """Test that a missing directory yields no checks."""
        loader = CheckLoader(checks_dir=f"{temp_config_dir}/nowhere")

        assert loader.discover_checks() == {}

    def test_custom_package(self, tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test loading checks from another importable package."""
        package = tmp_path / "extra_invariants"
        package.mkdir()
        (package / "__init__.py").write_text("")
        (package / "demo_checks.py").write_text(
            "from mskit.checks import InvariantCheck\n"
            "\n"
            "\n"
            "class DemoCheck(InvariantCheck):\n"
            "    fixed_tolerance = 1.0\n"
            "\n"
            "    name = 'demo.zero'\n"
            "    description = 'always zero'\n"
            "    module = 'demo'\n"
            "\n"
            "    def measure(self, level, seed):\n"
            "        return 0.0\n"
        )
        (package / "notes.py").write_text("VALUE = 1\n")
        monkeypatch.syspath_prepend(str(tmp_path))

        loader = CheckLoader(checks_dir=str(package), package="extra_invariants")

        assert list(loader.discover_checks()) == ["demo.zero"]
        assert loader.get_check("demo.zero").run(TINY).passed

    def test_get_check_unknown(self) -> None:
        with pytest.raises(CheckError, match="Check 'nope.nothing' not found"):
            CheckLoader().get_check("nope.nothing")

    def test_get_check_is_cached_per_tolerances(self) -> None:
        loader = CheckLoader()
        tolerances = Tolerances()

        first = loader.get_check("matops.hermitian_sqrt", tolerances)

        assert loader.get_check("matops.hermitian_sqrt", tolerances) is first
        assert first.tolerances is tolerances
        assert loader.get_check("matops.hermitian_sqrt") is not first

    def test_list_available_checks(self) -> None:
        checks = CheckLoader().list_available_checks()

        assert list(checks) == sorted(checks)
        assert checks["matops.rank_invariance"] == "rank is unchanged by multiplication with seeded unitaries"

    def test_reload_checks(self) -> None:
        loader = CheckLoader()
        loader.get_check("matops.hermitian_sqrt")

        loader.reload_checks()

        assert loader._check_instances == {}
        assert len(loader._loaded_checks) == 30


class TestCheckRegistry:
    """Test cases for CheckRegistry."""

    def test_initialize_once(self) -> None:
        loader = MagicMock()
        registry = CheckRegistry(loader=loader)

        registry.initialize()
        registry.initialize()

        loader.discover_checks.assert_called_once()

    def test_initialize_failure(self) -> None:
        loader = MagicMock()
        loader.discover_checks.side_effect = RuntimeError("broken module")

        with pytest.raises(CheckError, match="initialization failed"):
            CheckRegistry(loader=loader).initialize()

    def test_list_checks_by_module(self) -> None:
        registry = CheckRegistry()

        assert list(registry.list_checks("matops")) == [
            "matops.defect_intertwining",
            "matops.hermitian_sqrt",
            "matops.rank_invariance",
        ]
        assert len(registry.list_checks()) == 30
        assert registry.list_checks("no_such_module") == {}

    def test_has_check(self) -> None:
        registry = CheckRegistry()

        assert registry.has_check("zerosym.dimension")
        assert not registry.has_check("zerosym.nothing")

    def test_get_check_info(self) -> None:
        info = CheckRegistry().get_check_info("matops.hermitian_sqrt")

        assert info["module"] == "matops"
        assert info["tolerance_key"] == "tol_psd"
        assert info["tolerance"] == Tolerances().tol_psd
        assert info["class_name"] == "HermitianSqrtCheck"

    def test_registry_tolerances_reach_checks(self) -> None:
        tolerances = Tolerances().with_overrides({"tol_psd": 1e-3})

        assert CheckRegistry(tolerances=tolerances).get_check("matops.hermitian_sqrt").tolerance == 1e-3

    def test_execute_check_unknown(self) -> None:
        with pytest.raises(CheckError, match="not found"):
            CheckRegistry().execute_check("matops.nothing", "quick")

    def test_execute_check_wraps_foreign_crash(self) -> None:
        check = MagicMock()
        check.run.side_effect = RuntimeError("segfault in disguise")
        loader = MagicMock()
        loader.get_check.return_value = check

        with pytest.raises(CheckError, match="Failed to execute check 'x.y'") as exc_info:
            CheckRegistry(loader=loader).execute_check("x.y", "quick")

        assert isinstance(exc_info.value.__cause__, RuntimeError)

    def test_run_matops_module(self) -> None:
        """Test a quick run of the dense matrix kernel invariants."""
        results = CheckRegistry().run_all("quick", "matops")

        assert [result.name for result in results] == [
            "matops.defect_intertwining",
            "matops.hermitian_sqrt",
            "matops.rank_invariance",
        ]
        for result in results:
            assert result.passed, result
            assert result.instances == LEVELS["quick"].seeds


class TestMutations:
    """Checks must notice deliberately broken operators."""

    def test_sign_error_in_symbol_push_is_caught(self) -> None:
        original = crofoot.symbol_push

        def broken_push(*args, **kwargs):
            return -original(*args, **kwargs)

        registry = CheckRegistry()
        with patch("mskit.operators.crofoot.symbol_push", side_effect=broken_push):
            result = registry.execute_check("crofoot.intertwining", "quick")

        assert not result.passed
        assert result.worst > 1.0

    def test_converse_with_no_gated_instance_is_skipped(self) -> None:
        """A converse run whose gate admits no instance must not pass."""
        split = MagicMock()
        split.residual = 0.0

        registry = CheckRegistry()
        with patch("mskit.checks.zerosym_checks.zero_residual", return_value=split):
            result = registry.execute_check("zerosym.converse", "quick")

        assert not result.passed
        assert result.status == "SKIP"
        assert len(result.skipped_seeds) == LEVELS["quick"].bulk_seeds
