"""Configuration service implementation."""

import configparser
import os
from typing import Any

from platformdirs import user_config_dir

from mskit.exceptions import ConfigurationError
from mskit.operators.circle_fun import DEFAULT_GRID, MAX_GRID
from mskit.operators.inner import MAX_ZERO
from mskit.tolerances import Tolerances

CONFIG_FILE = os.path.join(user_config_dir("mskit", ensure_exists=True), "config.ini")
SEED_ENV = "MSK_SEED"


class ConfigServiceImpl:
    """Configuration service implementation."""

    def __init__(self, config_file: str = CONFIG_FILE) -> None:
        self.config_file = config_file

    def _get_config(self) -> configparser.ConfigParser:
        """Get configuration parser instance."""
        config = configparser.ConfigParser()
        config.read(self.config_file)
        return config

    def _save_config(self, config: configparser.ConfigParser) -> None:
        """Save configuration to file."""
        try:
            with open(self.config_file, "w") as configfile:
                config.write(configfile)
        except Exception as e:
            raise ConfigurationError("Failed to save configuration", str(e)) from e

    def _set(self, section: str, option: str, value: str) -> None:
        config = self._get_config()
        if not config.has_section(section):
            config.add_section(section)
        config.set(section, option, value)
        self._save_config(config)

    def get_grid_size(self) -> int:
        """Get the default sampling grid size."""
        config = self._get_config()
        try:
            return config.getint("Grid", "size")
        except (configparser.NoSectionError, configparser.NoOptionError):
            return DEFAULT_GRID
        except ValueError as e:
            raise ConfigurationError("Grid size in configuration is not an integer", str(e)) from e

    def set_grid_size(self, size: int) -> None:
        if size < 4 or size > MAX_GRID or size & (size - 1):
            raise ConfigurationError(f"Grid size must be a power of two in [4, {MAX_GRID}]")
        self._set("Grid", "size", str(size))

    def get_max_zero(self) -> float:
        """Get the largest allowed modulus of a Blaschke-Potapov zero."""
        config = self._get_config()
        try:
            return config.getfloat("Grid", "max_zero")
        except (configparser.NoSectionError, configparser.NoOptionError):
            return MAX_ZERO
        except ValueError as e:
            raise ConfigurationError("max_zero in configuration is not a number", str(e)) from e

    def set_max_zero(self, value: float) -> None:
        if not 0.0 < value < 1.0:
            raise ConfigurationError("max_zero must lie strictly between 0 and 1")
        self._set("Grid", "max_zero", str(value))

    def get_seed(self) -> int:
        """Get the default run seed; the MSK_SEED environment variable takes precedence."""
        env = os.environ.get(SEED_ENV)
        if env is not None and env.strip():
            try:
                return int(env)
            except ValueError as e:
                raise ConfigurationError(f"{SEED_ENV} must be an integer, got '{env}'") from e
        config = self._get_config()
        try:
            return config.getint("Run", "seed")
        except (configparser.NoSectionError, configparser.NoOptionError):
            return 0
        except ValueError as e:
            raise ConfigurationError("Seed in configuration is not an integer", str(e)) from e

    def set_seed(self, seed: int) -> None:
        if seed < 0:
            raise ConfigurationError("Seed must be nonnegative")
        self._set("Run", "seed", str(seed))

    def get_workers(self) -> int:
        config = self._get_config()
        try:
            return config.getint("Run", "workers")
        except (configparser.NoSectionError, configparser.NoOptionError):
            return 1
        except ValueError as e:
            raise ConfigurationError("Worker count in configuration is not an integer", str(e)) from e

    def set_workers(self, workers: int) -> None:
        if workers <= 0:
            raise ConfigurationError("Worker count must be positive")
        self._set("Run", "workers", str(workers))

    def get_tolerances(self) -> Tolerances:
        """Built-in tolerances with the [Tolerances] section applied."""
        config = self._get_config()
        if not config.has_section("Tolerances"):
            return Tolerances()
        return Tolerances().with_overrides(dict(config.items("Tolerances")))

    def set_tolerance(self, key: str, value: float) -> None:
        Tolerances().with_overrides({key: value})
        self._set("Tolerances", key, str(value))

    def set_option(self, key: str, value: str) -> None:
        """Set a dotted option such as ``grid.size`` or ``tolerances.gram_tol``."""
        section, _, option = key.lower().partition(".")
        try:
            if section == "tolerances" and option:
                self.set_tolerance(option, float(value))
            elif key.lower() == "grid.size":
                self.set_grid_size(int(value))
            elif key.lower() == "grid.max_zero":
                self.set_max_zero(float(value))
            elif key.lower() == "run.seed":
                self.set_seed(int(value))
            elif key.lower() == "run.workers":
                self.set_workers(int(value))
            else:
                raise ConfigurationError(
                    f"Unknown configuration key '{key}'",
                    "use grid.size, grid.max_zero, run.seed, run.workers or tolerances.<name>",
                )
        except ValueError as e:
            raise ConfigurationError(f"Invalid value '{value}' for '{key}'", str(e)) from e

    def as_dict(self) -> dict[str, Any]:
        """Effective configuration, for display."""
        return {
            "config_file": self.config_file,
            "grid": {"size": self.get_grid_size(), "max_zero": self.get_max_zero()},
            "run": {"seed": self.get_seed(), "workers": self.get_workers()},
            "tolerances": self.get_tolerances().as_dict(),
        }
