"""Registry for running invariant checks."""

import logging
from typing import Any

from mskit.exceptions import CheckError
from mskit.tolerances import Tolerances

from .base import CheckResult, InvariantCheck, Level
from .check_loader import CheckLoader

logger = logging.getLogger(__name__)


class CheckRegistry:
    """Central registry for the invariant checks behind ``selftest``."""

    def __init__(self, tolerances: Tolerances | None = None, loader: CheckLoader | None = None) -> None:
        self.tolerances = tolerances
        self.loader = loader if loader is not None else CheckLoader()
        self._initialized = False

    def initialize(self) -> None:
        """Discover the available checks once."""
        if self._initialized:
            return

        try:
            self.loader.discover_checks()
            self._initialized = True
            logger.info("Check registry initialized successfully")
        except Exception as e:
            logger.error(f"Failed to initialize check registry: {e}")
            raise CheckError(f"Check registry initialization failed: {e}") from e

    def get_check(self, check_name: str) -> InvariantCheck:
        if not self._initialized:
            self.initialize()

        return self.loader.get_check(check_name, tolerances=self.tolerances)

    def has_check(self, check_name: str) -> bool:
        if not self._initialized:
            self.initialize()

        return check_name in self.loader._loaded_checks

    def list_checks(self, module: str | None = None) -> dict[str, str]:
        """Map check names to descriptions, optionally for one operator module."""
        if not self._initialized:
            self.initialize()

        checks = self.loader.list_available_checks()
        if module is None:
            return checks
        return {name: desc for name, desc in checks.items() if self.get_check(name).module == module}

    def execute_check(self, check_name: str, level: Level | str) -> CheckResult:
        """Run one check at a level.

        Raises:
            CheckError: If the check is unknown or crashes outside the mskit error hierarchy
        """
        try:
            check = self.get_check(check_name)
            result = check.run(level)
            logger.debug(f"Check '{check_name}' finished: passed={result.passed}")
            return result
        except CheckError:
            raise
        except Exception as e:
            raise CheckError(f"Failed to execute check '{check_name}': {e}") from e

    def run_all(self, level: Level | str, module: str | None = None) -> list[CheckResult]:
        """Run every check, or every check of one module, in name order."""
        return [self.execute_check(name, level) for name in self.list_checks(module)]

    def get_check_info(self, check_name: str) -> dict[str, Any]:
        check = self.get_check(check_name)

        return {
            "name": check.name,
            "description": check.description,
            "module": check.module,
            "tolerance_key": check.tolerance_key,
            "tolerance": check.tolerance,
            "class_name": check.__class__.__name__,
        }
