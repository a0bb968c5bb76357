"""Tests for configuration service and tolerances."""

import configparser
import os

import pytest

from mskit.exceptions import ConfigurationError
from mskit.operators.circle_fun import DEFAULT_GRID
from mskit.operators.inner import MAX_ZERO
from mskit.services.config_service import ConfigServiceImpl
from mskit.tolerances import Tolerances, parse_tolerance_pairs


class TestConfigServiceImpl:
    """Test cases for ConfigServiceImpl."""

    def test_init_with_default_config_file(self) -> None:
        """Test initialization with default config file."""
        service = ConfigServiceImpl()
        assert "config.ini" in service.config_file

    def test_init_with_custom_config_file(self) -> None:
        """Test initialization with custom config file."""
        service = ConfigServiceImpl("/custom/path/config.ini")
        assert service.config_file == "/custom/path/config.ini"

    def test_save_config_writes_to_file(self, temp_config_dir: str) -> None:
        """Test that _save_config writes configuration to file."""
        config_file = os.path.join(temp_config_dir, "test_config.ini")
        service = ConfigServiceImpl(config_file)

        config = configparser.ConfigParser()
        config.add_section("Test")
        config.set("Test", "key", "value")
        service._save_config(config)

        saved_config = configparser.ConfigParser()
        saved_config.read(config_file)
        assert saved_config.get("Test", "key") == "value"

    def test_save_config_handles_write_error(self, temp_config_dir: str) -> None:
        """Test that _save_config handles write errors."""
        # A directory cannot be opened for writing
        service = ConfigServiceImpl(temp_config_dir)
        with pytest.raises(ConfigurationError, match="Failed to save configuration"):
            service._save_config(configparser.ConfigParser())

    def test_defaults_without_file(self, config_service: ConfigServiceImpl) -> None:
        """Test built-in defaults when no config file exists."""
        assert config_service.get_grid_size() == DEFAULT_GRID
        assert config_service.get_max_zero() == MAX_ZERO
        assert config_service.get_seed() == 0
        assert config_service.get_workers() == 1
        assert config_service.get_tolerances() == Tolerances()

    def test_values_from_file(self, temp_config_dir: str, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test reading every section from an existing file."""
        monkeypatch.delenv("MSK_SEED", raising=False)
        config_file = os.path.join(temp_config_dir, "test_config.ini")
        self._create_config_file(
            config_file,
            {
                "Grid": {"size": "2048", "max_zero": "0.8"},
                "Run": {"seed": "17", "workers": "4"},
                "Tolerances": {"gram_tol": "1e-7"},
            },
        )

        service = ConfigServiceImpl(config_file)

        assert service.get_grid_size() == 2048
        assert service.get_max_zero() == 0.8
        assert service.get_seed() == 17
        assert service.get_workers() == 4
        assert service.get_tolerances().gram_tol == 1e-7
        assert service.get_tolerances().unitary_tol == Tolerances().unitary_tol

    def test_invalid_values_in_file(self, temp_config_dir: str) -> None:
        """Test that malformed values raise ConfigurationError."""
        config_file = os.path.join(temp_config_dir, "test_config.ini")
        self._create_config_file(config_file, {"Grid": {"size": "big"}, "Tolerances": {"no_such_tol": "1"}})

        service = ConfigServiceImpl(config_file)

        with pytest.raises(ConfigurationError, match="not an integer"):
            service.get_grid_size()
        with pytest.raises(ConfigurationError, match="Unknown tolerance keys"):
            service.get_tolerances()

    def test_seed_environment_takes_precedence(
        self, config_service: ConfigServiceImpl, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that MSK_SEED overrides the configured seed."""
        config_service.set_seed(3)
        monkeypatch.setenv("MSK_SEED", "99")
        assert config_service.get_seed() == 99

        monkeypatch.setenv("MSK_SEED", "abc")
        with pytest.raises(ConfigurationError, match="MSK_SEED"):
            config_service.get_seed()

    def test_setters_round_trip(self, config_service: ConfigServiceImpl) -> None:
        """Test that setters persist values."""
        config_service.set_grid_size(256)
        config_service.set_max_zero(0.5)
        config_service.set_seed(11)
        config_service.set_workers(2)
        config_service.set_tolerance("shift_tol", 1e-5)

        reloaded = ConfigServiceImpl(config_service.config_file)
        assert reloaded.get_grid_size() == 256
        assert reloaded.get_max_zero() == 0.5
        assert reloaded.get_seed() == 11
        assert reloaded.get_workers() == 2
        assert reloaded.get_tolerances().shift_tol == 1e-5

    @pytest.mark.parametrize("size", [2, 100, 2**17])
    def test_set_grid_size_invalid(self, config_service: ConfigServiceImpl, size: int) -> None:
        """Test that grid sizes must be powers of two in range."""
        with pytest.raises(ConfigurationError, match="power of two"):
            config_service.set_grid_size(size)

    def test_set_invalid_values(self, config_service: ConfigServiceImpl) -> None:
        """Test validation in the remaining setters."""
        with pytest.raises(ConfigurationError):
            config_service.set_max_zero(1.0)
        with pytest.raises(ConfigurationError):
            config_service.set_seed(-1)
        with pytest.raises(ConfigurationError):
            config_service.set_workers(0)
        with pytest.raises(ConfigurationError):
            config_service.set_tolerance("gram_tol", -1.0)

    @pytest.mark.parametrize(
        "key,value,getter,expected",
        [
            ("grid.size", "4096", "get_grid_size", 4096),
            ("GRID.MAX_ZERO", "0.7", "get_max_zero", 0.7),
            ("run.seed", "5", "get_seed", 5),
            ("run.workers", "3", "get_workers", 3),
        ],
    )
    def test_set_option(
        self, config_service: ConfigServiceImpl, key: str, value: str, getter: str, expected: float
    ) -> None:
        """Test dotted option keys."""
        config_service.set_option(key, value)
        assert getattr(config_service, getter)() == expected

    def test_set_option_tolerance(self, config_service: ConfigServiceImpl) -> None:
        """Test setting a tolerance through a dotted key."""
        config_service.set_option("tolerances.block_tol", "1e-6")
        assert config_service.get_tolerances().block_tol == 1e-6

    @pytest.mark.parametrize("key,value", [("grid.colour", "1"), ("grid.size", "huge"), ("tolerances.gram_tol", "x")])
    def test_set_option_invalid(self, config_service: ConfigServiceImpl, key: str, value: str) -> None:
        """Test that unknown keys and bad values raise ConfigurationError."""
        with pytest.raises(ConfigurationError):
            config_service.set_option(key, value)

    def test_as_dict(self, config_service: ConfigServiceImpl) -> None:
        """Test the display form of the configuration."""
        settings = config_service.as_dict()
        assert settings["config_file"] == config_service.config_file
        assert settings["grid"]["size"] == DEFAULT_GRID
        assert settings["run"] == {"seed": 0, "workers": 1}
        assert set(settings["tolerances"]) == set(Tolerances.names())

    def _create_config_file(self, config_file: str, config_data: dict) -> None:
        """Helper method to create config file with test data."""
        config = configparser.ConfigParser()
        for section, options in config_data.items():
            config.add_section(section)
            for key, value in options.items():
                config.set(section, key, value)

        with open(config_file, "w") as f:
            config.write(f)


class TestTolerances:
    """Test cases for the tolerance set."""

    def test_overrides_return_a_copy(self) -> None:
        base = Tolerances()
        changed = base.with_overrides({"unitary_tol": "1e-5"})
        assert changed.unitary_tol == 1e-5
        assert base.unitary_tol == 1e-7

    @pytest.mark.parametrize(
        "overrides,message",
        [
            ({"nope": 1.0}, "Unknown tolerance keys"),
            ({"gram_tol": "abc"}, "must be a number"),
            ({"gram_tol": 0.0}, "must be positive"),
            ({"gram_tol": -1e-3}, "must be positive"),
        ],
    )
    def test_invalid_overrides(self, overrides: dict, message: str) -> None:
        with pytest.raises(ConfigurationError, match=message):
            Tolerances().with_overrides(overrides)

    def test_names_cover_every_field(self) -> None:
        assert len(Tolerances.names()) == 20
        assert set(Tolerances().as_dict()) == set(Tolerances.names())

    def test_parse_pairs(self) -> None:
        assert parse_tolerance_pairs(["gram_tol=1e-7", " shift_tol = 2e-8 "]) == {
            "gram_tol": "1e-7",
            "shift_tol": "2e-8",
        }

    @pytest.mark.parametrize("pair", ["gram_tol", "=1e-7", ""])
    def test_parse_pairs_invalid(self, pair: str) -> None:
        with pytest.raises(ConfigurationError, match="KEY=VAL"):
            parse_tolerance_pairs([pair])
