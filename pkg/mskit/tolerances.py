"""Numeric thresholds shared by tasks, checks and configuration."""

import dataclasses
from collections.abc import Mapping
from typing import Any

from mskit.exceptions import ConfigurationError


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Every numeric threshold used by tasks and invariant checks."""

    eps_strict: float = 1e-6
    tol_psd: float = 1e-10
    cond_max: float = 1e12
    tol_inner: float = 1e-8
    rank_rel_tol: float = 1e-10
    dim_rel_tol: float = 1e-9
    gram_tol: float = 1e-9
    membership_tol: float = 1e-8
    unitary_tol: float = 1e-7
    kernel_action_tol: float = 1e-8
    intertwining_tol: float = 1e-6
    push_pull_tol: float = 1e-9
    identity_tol: float = 1e-9
    reproduction_tol: float = 1e-9
    adjoint_tol: float = 1e-9
    block_tol: float = 1e-9
    shift_tol: float = 1e-8
    op_zero_rel: float = 1e-7
    sym_zero_rel: float = 1e-6
    purity_transfer_tol: float = 1e-10

    @classmethod
    def names(cls) -> list[str]:
        return [field.name for field in dataclasses.fields(cls)]

    def with_overrides(self, overrides: Mapping[str, Any]) -> "Tolerances":
        """Copy with some values replaced; unknown keys and non-positive values are rejected."""
        known = set(self.names())
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigurationError(f"Unknown tolerance keys: {unknown}", f"known keys: {sorted(known)}")
        parsed: dict[str, float] = {}
        for key, value in overrides.items():
            try:
                parsed[key] = float(value)
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"Tolerance '{key}' must be a number, got {value!r}") from e
            if not parsed[key] > 0.0:
                raise ConfigurationError(f"Tolerance '{key}' must be positive, got {value!r}")
        return dataclasses.replace(self, **parsed)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


def parse_tolerance_pairs(pairs: list[str]) -> dict[str, str]:
    """Split repeated ``KEY=VAL`` command-line values."""
    out: dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"Tolerance override must look like KEY=VAL, got '{pair}'")
        out[key.strip()] = value.strip()
    return out
