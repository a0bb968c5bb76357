"""Test configuration and fixtures."""

import json
import os
import tempfile
from collections.abc import Generator
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from mskit.operators.inner import InnerFn, blaschke_potapov, monomial
from mskit.operators.model_space import ModelSpaceBasis, basis
from mskit.services.config_service import ConfigServiceImpl

GRID = 512


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator, fresh for every test."""
    return np.random.default_rng(20240611)


@pytest.fixture
def grid() -> int:
    return GRID


@pytest.fixture
def temp_config_dir() -> Generator[str]:
    """Create a temporary directory for config files."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def config_service(temp_config_dir: str, monkeypatch: pytest.MonkeyPatch) -> ConfigServiceImpl:
    """Config service backed by a fresh file, with MSK_SEED unset."""
    monkeypatch.delenv("MSK_SEED", raising=False)
    return ConfigServiceImpl(os.path.join(temp_config_dir, "config.ini"))


@pytest.fixture
def theta_z2() -> InnerFn:
    """z^2 on C^1."""
    return monomial(2, 1, GRID)


@pytest.fixture
def theta_z3_d2() -> InnerFn:
    """z^3 I on C^2."""
    return monomial(3, 2, GRID)


@pytest.fixture
def theta_bp() -> InnerFn:
    """Scalar Blaschke product with zeros 0.3 + 0.1i, -0.2 + 0.4i and 0.45."""
    factors = [(0.3 + 0.1j, [[1.0]]), (-0.2 + 0.4j, [[1.0]]), (0.45, [[1.0]])]
    return blaschke_potapov(factors, 1, GRID)


@pytest.fixture
def theta_bp_d2() -> InnerFn:
    """Pure Blaschke-Potapov product on C^2 of degree 3."""
    e1 = np.array([[1.0, 0.0], [0.0, 0.0]])
    e2 = np.array([[0.0, 0.0], [0.0, 1.0]])
    v = np.array([[1.0], [1.0j]]) / np.sqrt(2.0)
    factors = [(0.4j, e1), (-0.3, e2), (0.25 + 0.25j, v @ v.conj().T)]
    return blaschke_potapov(factors, 2, GRID)


@pytest.fixture
def basis_bp(theta_bp: InnerFn) -> ModelSpaceBasis:
    return basis(theta_bp)


@pytest.fixture
def basis_bp_d2(theta_bp_d2: InnerFn) -> ModelSpaceBasis:
    return basis(theta_bp_d2)


@pytest.fixture
def scenario_payload() -> dict[str, Any]:
    """The smallest useful scenario: a dimension count between z^2 and z."""
    return {
        "name": "tiny",
        "seed": 0,
        "M": 256,
        "d": 1,
        "theta1": {"type": "monomial", "n": 2, "d": 1},
        "theta2": {"type": "monomial", "n": 1, "d": 1},
        "tasks": ["dim"],
    }


@pytest.fixture
def scenario_file(scenario_payload: dict[str, Any], temp_config_dir: str) -> str:
    path = Path(temp_config_dir) / "tiny.json"
    path.write_text(json.dumps(scenario_payload, indent=2), encoding="utf-8")
    return str(path)


def pytest_configure(config: Any) -> None:
    import logging

    logging.basicConfig(level=logging.DEBUG)
