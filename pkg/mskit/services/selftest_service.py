"""Selftest service implementation."""

import logging
import math
from typing import TYPE_CHECKING

from mskit.checks import CheckRegistry, CheckResult
from mskit.checks.base import resolve_level

if TYPE_CHECKING:
    from mskit.services.interfaces import ConfigService

logger = logging.getLogger(__name__)


class SelftestServiceImpl:
    """Runs the invariant checks of every operator module."""

    def __init__(self, config_service: "ConfigService | None" = None, registry: CheckRegistry | None = None) -> None:
        self.config_service = config_service
        if registry is None:
            tolerances = config_service.get_tolerances() if config_service is not None else None
            registry = CheckRegistry(tolerances=tolerances)
        self.registry = registry

    def list_checks(self, module: str | None = None) -> dict[str, str]:
        return self.registry.list_checks(module)

    def run(self, level: str, module: str | None = None) -> list[CheckResult]:
        """Run every check (or those of one module) at the given level."""
        resolved = resolve_level(level)
        logger.info(f"Running selftest at level '{resolved.name}'" + (f" for module '{module}'" if module else ""))
        results = self.registry.run_all(resolved, module)
        failed = [result.name for result in results if not result.passed]
        findings = sum(len(result.findings) for result in results if result.findings)
        if failed:
            logger.warning(f"{len(failed)} invariant(s) failed: {', '.join(failed)}")
        else:
            logger.info(f"All {len(results)} invariants passed ({findings} finding record(s))")
        return results


def _fmt(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf"
    return f"{value:.2e}"


def format_summary(results: list[CheckResult]) -> list[str]:
    """Fixed-width summary table, one row per check."""
    width = max([len(result.name) for result in results] + [len("check")])
    rows = [f"{'check':<{width}}  {'status':<6}  {'worst':>9}  {'tol':>9}  {'n':>4}  {'ms':>8}"]
    for result in results:
        rows.append(
            f"{result.name:<{width}}  {result.status:<6}  {_fmt(result.worst):>9}  {_fmt(result.tolerance):>9}"
            f"  {result.instances:>4}  {result.runtime_ms:>8.0f}"
        )
    return rows
