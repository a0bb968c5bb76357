"""Base invariant check interface."""

import dataclasses
import logging
import math
import time
from abc import ABC, abstractmethod

from mskit.exceptions import CheckError, MskitError
from mskit.operators.circle_fun import DEFAULT_GRID
from mskit.records import Finding
from mskit.tolerances import Tolerances

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class Level:
    """How hard a selftest run pushes.

    ``seeds`` instances are drawn per check, ``bulk_seeds`` for the cheap
    constructions of the zero-symbol checks.
    """

    name: str
    max_d: int
    seeds: int
    bulk_seeds: int
    grid: int = DEFAULT_GRID


LEVELS = {
    "quick": Level(name="quick", max_d=2, seeds=5, bulk_seeds=10),
    "full": Level(name="full", max_d=3, seeds=20, bulk_seeds=50),
}


def resolve_level(level: Level | str) -> Level:
    if isinstance(level, Level):
        return level
    try:
        return LEVELS[level]
    except KeyError as e:
        raise CheckError(f"Unknown selftest level '{level}'", f"choose from {sorted(LEVELS)}") from e


@dataclasses.dataclass
class CheckResult:
    name: str
    module: str
    passed: bool
    worst: float
    tolerance: float
    instances: int
    failing_seeds: list[int] = dataclasses.field(default_factory=list)
    skipped_seeds: list[int] = dataclasses.field(default_factory=list)
    findings: list[Finding] = dataclasses.field(default_factory=list)
    errors: list[str] = dataclasses.field(default_factory=list)
    runtime_ms: float = 0.0

    @property
    def all_skipped(self) -> bool:
        """Every instance fell outside the check's hypotheses, so nothing was tested."""
        return self.instances > 0 and len(self.skipped_seeds) == self.instances

    @property
    def status(self) -> str:
        if self.all_skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"


class InvariantCheck(ABC):
    """Abstract base class for invariant checks.

    A check measures one residual per seeded instance and passes when every
    residual is within its tolerance. Checks whose measure must stay above a
    threshold set ``higher_is_better``.
    """

    tolerance_key: str = ""
    fixed_tolerance: float | None = None
    higher_is_better: bool = False

    def __init__(self, tolerances: Tolerances | None = None) -> None:
        """Initialize the check.

        Args:
            tolerances: Thresholds to check against; defaults to the built-in values
        """
        self.tolerances = tolerances if tolerances is not None else Tolerances()
        self.logger = logging.getLogger(f"{self.__class__.__module__}.{self.__class__.__name__}")
        self._findings: list[Finding] = []

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the unique name of this check."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Return a human-readable description of the property checked."""
        pass

    @property
    @abstractmethod
    def module(self) -> str:
        """Return the operator module this check exercises."""
        pass

    @property
    def tolerance(self) -> float:
        if self.fixed_tolerance is not None:
            return self.fixed_tolerance
        return float(getattr(self.tolerances, self.tolerance_key))

    def seeds(self, level: Level) -> range:
        """Seeds of the instances to measure; override for fixed grids of cases."""
        return range(level.seeds)

    @abstractmethod
    def measure(self, level: Level, seed: int) -> float | None:
        """Residual for one seeded instance, or None when the instance falls
        outside the check's hypotheses and is skipped.

        Raises:
            MskitError: If the instance cannot be built; the seed counts as failing
        """
        pass

    def passes(self, value: float) -> bool:
        if math.isnan(value):
            return False
        return value >= self.tolerance if self.higher_is_better else value <= self.tolerance

    def add_finding(self, seed: int, lhs: float, rhs: float, tolerance: float, verdict: str = "finding") -> None:
        """Record a comparison that is reported but does not decide the verdict."""
        self._findings.append(
            Finding(
                check=self.name,
                instance_seed=seed,
                lhs=float(lhs),
                rhs=float(rhs),
                tolerance=float(tolerance),
                verdict=verdict,
            )
        )

    def run(self, level: Level | str) -> CheckResult:
        """Measure every instance of the level and collect the outcome."""
        resolved = resolve_level(level)
        self._findings = []
        start = time.perf_counter()
        failing: list[int] = []
        errors: list[str] = []
        skipped: list[int] = []
        values: list[float] = []
        seeds = self.seeds(resolved)
        for seed in seeds:
            try:
                measured = self.measure(resolved, seed)
            except MskitError as e:
                failing.append(seed)
                errors.append(f"seed {seed}: {e.message}")
                self.logger.warning(f"{self.name} seed {seed} raised {type(e).__name__}: {e.message}")
                continue
            if measured is None:
                skipped.append(seed)
                continue
            value = float(measured)
            values.append(value)
            if not self.passes(value):
                failing.append(seed)
        if not values or any(math.isnan(v) for v in values):
            worst = math.nan
        else:
            worst = min(values) if self.higher_is_better else max(values)
        nothing_tested = len(seeds) > 0 and len(skipped) == len(seeds)
        if nothing_tested:
            errors.append(f"no instance met the hypotheses ({len(skipped)} skipped)")
            self.logger.warning(f"{self.name}: every instance was skipped, nothing was tested")
        result = CheckResult(
            name=self.name,
            module=self.module,
            passed=not failing and not nothing_tested,
            worst=worst,
            tolerance=self.tolerance,
            instances=len(seeds),
            failing_seeds=failing,
            skipped_seeds=skipped,
            findings=list(self._findings),
            errors=errors,
            runtime_ms=(time.perf_counter() - start) * 1000.0,
        )
        self.logger.debug(f"{self.name}: worst {worst:.3e} against {self.tolerance:.1e} over {len(seeds)} instances")
        return result

    def __str__(self) -> str:
        """String representation of the check."""
        return f"{self.name}: {self.description}"

    def __repr__(self) -> str:
        """Developer representation of the check."""
        return f"InvariantCheck(name='{self.name}', module='{self.module}')"
