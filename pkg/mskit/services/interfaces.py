"""Service interfaces and protocols for dependency injection."""

from collections.abc import Mapping, Sequence
from typing import IO, Any, Protocol

from mskit.checks.base import CheckResult
from mskit.records import ReportRecord
from mskit.services.schemas import Scenario
from mskit.tolerances import Tolerances


class ConfigService(Protocol):
    """Protocol for configuration service."""

    def get_grid_size(self) -> int: ...
    def set_grid_size(self, size: int) -> None: ...
    def get_max_zero(self) -> float: ...
    def set_max_zero(self, value: float) -> None: ...
    def get_seed(self) -> int: ...
    def set_seed(self, seed: int) -> None: ...
    def get_workers(self) -> int: ...
    def set_workers(self, workers: int) -> None: ...
    def get_tolerances(self) -> Tolerances: ...
    def set_tolerance(self, key: str, value: float) -> None: ...
    def set_option(self, key: str, value: str) -> None: ...
    def as_dict(self) -> dict[str, Any]: ...


class ScenarioService(Protocol):
    """Protocol for scenario service."""

    def list_scenarios(self) -> list[str]: ...
    def suggest(self, name: str) -> str | None: ...
    def load(self, name_or_path: str) -> Scenario: ...
    def run(
        self,
        scenario: Scenario,
        seed: int | None = None,
        grid: int | None = None,
        tolerance_overrides: Mapping[str, Any] | None = None,
    ) -> list[ReportRecord]: ...
    def run_many(
        self,
        scenarios: Sequence[Scenario],
        seed: int | None = None,
        grid: int | None = None,
        tolerance_overrides: Mapping[str, Any] | None = None,
        workers: int = 1,
    ) -> list[list[ReportRecord]]: ...


class ReportService(Protocol):
    """Protocol for report service."""

    def write(self, record: ReportRecord) -> None: ...
    def write_all(self, records: Sequence[ReportRecord]) -> None: ...
    def open(self, stream: IO[str]) -> None: ...
    def close(self) -> None: ...
    def serialize(self, record: ReportRecord) -> str: ...


class SelftestService(Protocol):
    """Protocol for selftest service."""

    def list_checks(self, module: str | None = None) -> dict[str, str]: ...
    def run(self, level: str, module: str | None = None) -> list[CheckResult]: ...
