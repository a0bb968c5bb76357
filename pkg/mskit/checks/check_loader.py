"""Invariant check discovery."""

import importlib
import inspect
import logging
import os
import sys
from pathlib import Path

from mskit.exceptions import CheckError
from mskit.tolerances import Tolerances

from .base import InvariantCheck

logger = logging.getLogger(__name__)

CHECK_PACKAGE = "mskit.checks"


class CheckLoader:
    """Loads invariant checks from the ``*_checks.py`` modules of a directory."""

    def __init__(self, checks_dir: str | None = None, package: str = CHECK_PACKAGE):
        """Initialize the check loader.

        Args:
            checks_dir: Directory containing check modules.
                        Defaults to the directory of this file.
            package: Import path of that directory
        """
        if checks_dir is None:
            checks_dir = os.path.dirname(os.path.abspath(__file__))

        self.checks_dir = Path(checks_dir)
        self.package = package
        self._loaded_checks: dict[str, type[InvariantCheck]] = {}
        self._check_instances: dict[str, InvariantCheck] = {}

    def discover_checks(self) -> dict[str, type[InvariantCheck]]:
        """Discover all check classes in the checks directory.

        Returns:
            Dictionary mapping check names to check classes

        Raises:
            CheckError: If discovery fails or two checks share a name
        """
        discovered: dict[str, type[InvariantCheck]] = {}

        if not self.checks_dir.exists():
            logger.warning(f"Checks directory does not exist: {self.checks_dir}")
            return discovered

        try:
            for file_path in sorted(self.checks_dir.glob("*_checks.py")):
                if file_path.name.startswith("_"):
                    continue
                for check_name, check_class in self._load_check_module(file_path.stem).items():
                    if check_name in discovered and discovered[check_name] is not check_class:
                        raise CheckError(f"Duplicate check name '{check_name}' in {file_path.name}")
                    discovered[check_name] = check_class
        except CheckError:
            raise
        except Exception as e:
            raise CheckError(f"Failed to discover checks: {e}") from e

        self._loaded_checks.update(discovered)
        logger.info(f"Discovered {len(discovered)} invariant checks")
        return discovered

    def _load_check_module(self, module_name: str) -> dict[str, type[InvariantCheck]]:
        """Import one module and collect its concrete InvariantCheck subclasses."""
        check_classes = {}

        try:
            module = importlib.import_module(f"{self.package}.{module_name}")

            for attr_name in dir(module):
                attr = getattr(module, attr_name)

                if (
                    isinstance(attr, type)
                    and issubclass(attr, InvariantCheck)
                    and attr is not InvariantCheck
                    and not inspect.isabstract(attr)
                ):
                    try:
                        instance = attr()
                        check_classes[instance.name] = attr
                        logger.debug(f"Loaded check: {instance.name} from {module_name}")
                    except Exception as e:
                        logger.warning(f"Failed to instantiate check {attr_name}: {e}")

        except ImportError as e:
            logger.warning(f"Failed to import check module {module_name}: {e}")

        return check_classes

    def get_check(self, check_name: str, tolerances: Tolerances | None = None) -> InvariantCheck:
        """Get a check instance bound to the given tolerances.

        Raises:
            CheckError: If the check is not found or cannot be instantiated
        """
        cache_key = f"{check_name}_{id(tolerances) if tolerances else 'none'}"
        if cache_key in self._check_instances:
            return self._check_instances[cache_key]

        if not self._loaded_checks:
            self.discover_checks()

        check_class = self._loaded_checks.get(check_name)
        if not check_class:
            available = sorted(self._loaded_checks)
            raise CheckError(f"Check '{check_name}' not found. Available checks: {available}")

        try:
            instance = check_class(tolerances=tolerances)
            self._check_instances[cache_key] = instance
            return instance
        except Exception as e:
            raise CheckError(f"Failed to create check instance '{check_name}': {e}") from e

    def list_available_checks(self) -> dict[str, str]:
        """Map check names to descriptions."""
        if not self._loaded_checks:
            self.discover_checks()

        return {name: check_class().description for name, check_class in sorted(self._loaded_checks.items())}

    def reload_checks(self) -> None:
        """Re-import check modules and discover again."""
        self._loaded_checks.clear()
        self._check_instances.clear()

        modules_to_reload = [
            name for name in sys.modules if name.startswith(f"{self.package}.") and name.endswith("_checks")
        ]
        for module_name in modules_to_reload:
            try:
                importlib.reload(sys.modules[module_name])
            except Exception as e:
                logger.warning(f"Failed to reload module {module_name}: {e}")

        self.discover_checks()
        logger.info("Checks reloaded successfully")
