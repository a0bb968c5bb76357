"""Report records shared by scenario tasks and invariant checks."""

import dataclasses
import math
from typing import Any

SCHEMA_VERSION = 1
TASKS = ("basis", "tto", "crofoot", "zero", "dim", "selftest")
VERDICTS = ("pass", "fail", "finding")


def finite_or_none(value: float) -> float | None:
    """JSON has no NaN or infinity; such metrics are written as null."""
    value = float(value)
    return value if math.isfinite(value) else None


@dataclasses.dataclass(frozen=True)
class Finding:
    """A comparison whose outcome is reported rather than enforced."""

    check: str
    instance_seed: int
    lhs: float
    rhs: float
    tolerance: float
    verdict: str = "finding"

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "instance_seed": self.instance_seed,
            "lhs": finite_or_none(self.lhs),
            "rhs": finite_or_none(self.rhs),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


@dataclasses.dataclass
class ReportRecord:
    task: str
    scenario: str
    seed: int
    digest: str
    metrics: dict[str, float] = dataclasses.field(default_factory=dict)
    verdict: str = "pass"
    runtime_ms: float = 0.0
    findings: list[Finding] = dataclasses.field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "task": self.task,
            "scenario": self.scenario,
            "instance": {"seed": self.seed, "digest": self.digest},
            "metrics": {key: finite_or_none(value) for key, value in self.metrics.items()},
            "verdict": self.verdict,
            "runtime_ms": round(self.runtime_ms, 3),
            "schema_version": SCHEMA_VERSION,
            "findings": [finding.to_dict() for finding in self.findings],
        }
        if self.error is not None:
            payload["error"] = self.error
        return payload

