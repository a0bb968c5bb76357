"""Scenario service implementation."""

import dataclasses
import logging
import os
import time
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from difflib import get_close_matches
from typing import TYPE_CHECKING, Any

import numpy as np

from mskit.error_handling import ErrorHandler
from mskit.exceptions import ConfigurationError, GridError, MskitError, ValidationError
from mskit.operators import circle_fun as cf
from mskit.operators import matops, sampling
from mskit.operators.crofoot import (
    CrofootPair,
    SymbolFormula,
    intertwining_residuals,
    kernel_action_defect,
    push_pull_defect,
    transform,
)
from mskit.operators.inner import InnerFn, crofoot_identity_defect, crofoot_inner, inner_from_spec
from mskit.operators.model_space import ModelSpaceBasis, basis, reproduction_defect
from mskit.operators.tto import adjoint_pair_check, block_toeplitz, blocks_from_symbol, build, build_via_projection
from mskit.operators.zerosym import (
    ShiftOrder,
    class_shift,
    combine_pair,
    membership_pattern,
    symbol_pair,
    tto_space_dim,
    zero_equivalence_check,
)
from mskit.records import Finding, ReportRecord
from mskit.services.schemas import Scenario, parse_json, validate_scenario
from mskit.tolerances import Tolerances
from mskit.utils import digest, make_rng, matrix_from_json

if TYPE_CHECKING:
    from mskit.services.interfaces import ConfigService, SelftestService

logger = logging.getLogger(__name__)
SCENARIO_FOLDER = os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", "scenarios")
SAMPLE_POINTS = 5
SAMPLE_RADIUS = 0.8


@dataclasses.dataclass
class _Context:
    """Everything a scenario's tasks share, built once per run."""

    scenario: Scenario
    seed: int
    grid: int
    tolerances: Tolerances
    digest: str
    theta1: InnerFn
    theta2: InnerFn
    phi: cf.CircleFn
    w1: np.ndarray
    w2: np.ndarray
    _bases: tuple[ModelSpaceBasis, ModelSpaceBasis] | None = None

    @property
    def bases(self) -> tuple[ModelSpaceBasis, ModelSpaceBasis]:
        if self._bases is None:
            t = self.tolerances
            self._bases = (
                basis(self.theta1, rel_tol=t.rank_rel_tol, gram_tol=t.gram_tol, membership_tol=t.membership_tol),
                basis(self.theta2, rel_tol=t.rank_rel_tol, gram_tol=t.gram_tol, membership_tol=t.membership_tol),
            )
        return self._bases

    def rng(self, task: str) -> np.random.Generator:
        return make_rng(self.seed, "task", task)


@dataclasses.dataclass
class _Outcome:
    metrics: dict[str, float]
    failed: list[str] = dataclasses.field(default_factory=list)
    findings: list[Finding] = dataclasses.field(default_factory=list)

    def require(self, name: str, value: float, tolerance: float) -> None:
        """Record a metric that fails the task when it exceeds the tolerance."""
        self.metrics[name] = float(value)
        if not value <= tolerance:
            self.failed.append(f"{name} = {value:.3e} > {tolerance:.1e}")

    def report(self, ctx: _Context, check: str, lhs: float, rhs: float, tolerance: float, differs: bool) -> None:
        self.findings.append(
            Finding(
                check=check,
                instance_seed=ctx.seed,
                lhs=float(lhs),
                rhs=float(rhs),
                tolerance=float(tolerance),
                verdict="finding" if differs else "pass",
            )
        )


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as file:
        return file.read()


def _disk_point(rng: np.random.Generator) -> complex:
    return complex(SAMPLE_RADIUS * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random()))


class ScenarioServiceImpl:
    """Loads scenario files and runs their tasks into report records."""

    def __init__(
        self,
        config_service: "ConfigService",
        scenario_dir: str = SCENARIO_FOLDER,
        selftest_service: "SelftestService | None" = None,
    ) -> None:
        self.config_service = config_service
        self.scenario_dir = scenario_dir
        self.selftest_service = selftest_service
        self._tasks: dict[str, Callable[[_Context], _Outcome]] = {
            "basis": self._task_basis,
            "tto": self._task_tto,
            "crofoot": self._task_crofoot,
            "zero": self._task_zero,
            "dim": self._task_dim,
            "selftest": self._task_selftest,
        }

    def list_scenarios(self) -> list[str]:
        """Names of the bundled scenarios."""
        if not os.path.isdir(self.scenario_dir):
            return []
        return sorted(os.path.splitext(f)[0] for f in os.listdir(self.scenario_dir) if f.endswith(".json"))

    def suggest(self, name: str) -> str | None:
        matches = get_close_matches(name, self.list_scenarios(), n=1, cutoff=0.6)
        return matches[0] if matches else None

    def load(self, name_or_path: str) -> Scenario:
        """Read and validate a scenario file, or a bundled scenario by name."""
        path = name_or_path
        if not os.path.isfile(path):
            bundled = os.path.join(self.scenario_dir, f"{name_or_path}.json")
            if not os.path.isfile(bundled):
                suggestion = self.suggest(os.path.splitext(os.path.basename(name_or_path))[0])
                hint = f"did you mean '{suggestion}'?" if suggestion else "use 'mskit list' to see bundled scenarios"
                raise ValidationError(f"Scenario '{name_or_path}' not found", hint)
            path = bundled
        read = ErrorHandler.wrap_error(_read_text, ValidationError, f"Cannot read scenario '{path}'", "Loading scenario")
        text = read(path)
        default_name = os.path.splitext(os.path.basename(path))[0]
        scenario = validate_scenario(parse_json(text, source=path), text=text, name=default_name)
        logger.info(f"Loaded scenario '{scenario.name}' with tasks {list(scenario.tasks)}")
        return scenario

    def _run_seed(self, scenario: Scenario, seed: int | None) -> int:
        """Explicit seed, else the scenario's, else the configured default."""
        if seed is not None:
            return seed
        return scenario.seed if scenario.seed is not None else self.config_service.get_seed()

    def _context(
        self,
        scenario: Scenario,
        seed: int | None,
        grid: int | None,
        tolerance_overrides: Mapping[str, Any] | None,
    ) -> _Context:
        run_seed = self._run_seed(scenario, seed)
        run_grid = grid if grid is not None else scenario.grid if scenario.grid is not None else self.config_service.get_grid_size()
        tolerances = (
            self.config_service.get_tolerances()
            .with_overrides(scenario.tolerances)
            .with_overrides(dict(tolerance_overrides or {}))
        )
        run_digest = digest({"scenario": scenario.raw, "seed": run_seed, "M": run_grid, "tolerances": tolerances.as_dict()})
        try:
            cf.check_grid(run_grid)
        except GridError as e:
            raise ConfigurationError(e.message) from e
        max_zero = self.config_service.get_max_zero()
        theta1 = inner_from_spec(scenario.theta1, run_grid, max_zero, tolerances)
        theta2 = inner_from_spec(scenario.theta2, run_grid, max_zero, tolerances)
        for key, theta in (("theta1", theta1), ("theta2", theta2)):
            if theta.d != scenario.d:
                raise ValidationError(f"'{key}' has size {theta.d} but the scenario declares d = {scenario.d}")
        w1, w2 = self._crofoot_parameters(scenario, run_seed)
        return _Context(
            scenario=scenario,
            seed=run_seed,
            grid=run_grid,
            tolerances=tolerances,
            digest=run_digest,
            theta1=theta1,
            theta2=theta2,
            phi=self._symbol(scenario, run_seed, run_grid),
            w1=w1,
            w2=w2,
        )

    def _symbol(self, scenario: Scenario, seed: int, grid: int) -> cf.CircleFn:
        spec = scenario.symbol
        if "random" in spec:
            options = spec["random"]
            return sampling.random_laurent(
                make_rng(seed, "symbol"),
                scenario.d,
                int(options.get("degree", 2)),
                grid,
                float(options.get("scale", 1.0)),
            )
        coeffs: dict[int, np.ndarray] = {}
        for index, (k, matrix) in enumerate(spec["coeffs"]):
            if isinstance(k, bool) or not isinstance(k, int):
                raise ValidationError(f"symbol.coeffs[{index}]: the index must be an integer, got {k!r}")
            block = matrix_from_json(matrix, where=f"symbol.coeffs[{index}]")
            if block.shape != (scenario.d, scenario.d):
                raise ValidationError(f"symbol.coeffs[{index}] has shape {block.shape}, expected d x d with d = {scenario.d}")
            coeffs[k] = coeffs.get(k, 0) + block
        if not coeffs:
            return cf.zeros(scenario.d, scenario.d, grid)
        return cf.from_fourier(coeffs, grid)

    def _crofoot_parameters(self, scenario: Scenario, seed: int) -> tuple[np.ndarray, np.ndarray]:
        rng = make_rng(seed, "crofoot")
        drawn = sampling.random_strict_contraction(rng, scenario.d), sampling.random_strict_contraction(rng, scenario.d)
        given = scenario.crofoot or {}
        pair = []
        for key, default in zip(("W1", "W2"), drawn, strict=True):
            if key not in given:
                pair.append(default)
                continue
            w = matrix_from_json(given[key], where=f"crofoot.{key}")
            if w.shape != (scenario.d, scenario.d):
                raise ValidationError(f"crofoot.{key} has shape {w.shape}, expected d x d with d = {scenario.d}")
            pair.append(w)
        return pair[0], pair[1]

    def run(
        self,
        scenario: Scenario,
        seed: int | None = None,
        grid: int | None = None,
        tolerance_overrides: Mapping[str, Any] | None = None,
    ) -> list[ReportRecord]:
        """Run every task of the scenario in order.

        Raises:
            ValidationError: If the scenario's contents are inconsistent; no records are produced
            ConfigurationError: If the grid size or a tolerance override is invalid
        """
        try:
            ctx = self._context(scenario, seed, grid, tolerance_overrides)
        except (ValidationError, ConfigurationError):
            raise
        except MskitError as e:
            # The instance itself cannot be built, so every task fails
            logger.error(f"Scenario '{scenario.name}' could not be set up: {e.message}")
            run_seed = self._run_seed(scenario, seed)
            return [
                ReportRecord(
                    task=task,
                    scenario=scenario.name,
                    seed=run_seed,
                    digest=digest({"scenario": scenario.raw, "seed": run_seed}),
                    verdict="fail",
                    error=str(e),
                )
                for task in scenario.tasks
            ]
        return [self._run_task(ctx, task) for task in scenario.tasks]

    def run_many(
        self,
        scenarios: Sequence[Scenario],
        seed: int | None = None,
        grid: int | None = None,
        tolerance_overrides: Mapping[str, Any] | None = None,
        workers: int = 1,
    ) -> list[list[ReportRecord]]:
        """Run several scenarios, in parallel when ``workers > 1``; results keep the input order."""

        def run_one(scenario: Scenario) -> list[ReportRecord]:
            return self.run(scenario, seed, grid, tolerance_overrides)

        if workers <= 1 or len(scenarios) <= 1:
            return [run_one(scenario) for scenario in scenarios]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_one, scenarios))

    def _run_task(self, ctx: _Context, task: str) -> ReportRecord:
        start = time.perf_counter()
        record = ReportRecord(task=task, scenario=ctx.scenario.name, seed=ctx.seed, digest=ctx.digest)
        try:
            outcome = self._tasks[task](ctx)
        except MskitError as e:
            logger.warning(f"Task '{task}' of '{ctx.scenario.name}' raised {type(e).__name__}: {e.message}")
            record.verdict = "fail"
            record.error = str(e)
        else:
            record.metrics = outcome.metrics
            record.findings = outcome.findings
            if outcome.failed:
                record.verdict = "fail"
                record.error = "; ".join(outcome.failed)
            elif any(finding.verdict == "finding" for finding in outcome.findings):
                record.verdict = "finding"
        record.runtime_ms = (time.perf_counter() - start) * 1000.0
        logger.info(f"{ctx.scenario.name}/{task}: {record.verdict} in {record.runtime_ms:.0f} ms")
        return record

    def _task_basis(self, ctx: _Context) -> _Outcome:
        t = ctx.tolerances
        b1, b2 = ctx.bases
        out = _Outcome(metrics={"dim1": b1.dim, "dim2": b2.dim})
        rng = ctx.rng("basis")
        worst = 0.0
        for index, b in enumerate((b1, b2), start=1):
            out.require(f"gram_defect{index}", b.gram_defect, t.gram_tol)
            out.require(f"membership_defect{index}", b.membership_defect, t.membership_tol)
            f = b.synthesize(sampling.random_vector(rng, b.dim))
            for _ in range(SAMPLE_POINTS):
                lam = _disk_point(rng)
                worst = max(worst, reproduction_defect(b.theta, f, lam, sampling.random_vector(rng, b.theta.d)))
        out.require("reproduction_defect", worst, t.reproduction_tol)
        return out

    def _task_tto(self, ctx: _Context) -> _Outcome:
        t = ctx.tolerances
        b1, b2 = ctx.bases
        matrix = build(b1, b2, ctx.phi)
        rows, cols = matrix.shape
        out = _Outcome(metrics={"norm": matrix.norm, "rows": rows, "cols": cols})
        out.require("adjoint_defect", adjoint_pair_check(b1, b2, ctx.phi), t.adjoint_tol)
        oracle = build_via_projection(b1, b2, ctx.phi).mat
        out.require("projection_defect", matops.operator_norm(matrix.mat - oracle), t.block_tol)
        spec1, spec2 = ctx.scenario.theta1, ctx.scenario.theta2
        if spec1["type"] == spec2["type"] == "monomial" and int(spec1["n"]) >= int(spec2["n"]):
            n, m = int(spec1["n"]), int(spec2["n"])
            layout = block_toeplitz(n, m, blocks_from_symbol(ctx.phi, n, m), ctx.scenario.d)
            out.require("block_defect", matops.operator_norm(matrix.mat - layout), t.block_tol)
        return out

    def _crofoot_pair(self, ctx: _Context, theta: InnerFn, b: ModelSpaceBasis, w: np.ndarray) -> CrofootPair:
        t = ctx.tolerances
        prime = crofoot_inner(theta, w, t.eps_strict, t.tol_inner, t.tol_psd, t.cond_max)
        b_prime = basis(prime, rel_tol=t.rank_rel_tol, gram_tol=t.gram_tol, membership_tol=t.membership_tol)
        return transform(
            b, b_prime, w, t.unitary_tol, enforce=False, eps_strict=t.eps_strict, tol_psd=t.tol_psd, cond_max=t.cond_max
        )

    def _task_crofoot(self, ctx: _Context) -> _Outcome:
        t = ctx.tolerances
        b1, b2 = ctx.bases
        pair1 = self._crofoot_pair(ctx, ctx.theta1, b1, ctx.w1)
        pair2 = self._crofoot_pair(ctx, ctx.theta2, b2, ctx.w2)
        out = _Outcome(metrics={"w1_norm": matops.operator_norm(ctx.w1), "w2_norm": matops.operator_norm(ctx.w2)})
        out.require("unitarity_defect", max(pair1.unitarity_defect, pair2.unitarity_defect), t.unitary_tol)
        identity = max(
            crofoot_identity_defect(ctx.theta1, pair1.theta_prime, ctx.w1),
            crofoot_identity_defect(ctx.theta2, pair2.theta_prime, ctx.w2),
        )
        out.require("identity_defect", identity, t.identity_tol)
        residuals = intertwining_residuals(pair1, pair2, ctx.phi)
        out.require("intertwining_forward", residuals.forward, t.intertwining_tol)
        out.require("intertwining_reverse", residuals.reverse, t.intertwining_tol)
        out.require("push_pull_defect", push_pull_defect(ctx.phi, ctx.w1, ctx.w2, ctx.theta1, ctx.theta2), t.push_pull_tol)
        rng = ctx.rng("crofoot")
        worst = 0.0
        for pair in (pair1, pair2):
            for _ in range(SAMPLE_POINTS):
                worst = max(worst, kernel_action_defect(pair, _disk_point(rng), sampling.random_vector(rng, pair.theta.d)))
        out.require("kernel_action_defect", worst, t.kernel_action_tol)
        literal = intertwining_residuals(pair1, pair2, ctx.phi, formula=SymbolFormula.LITERAL)
        worst_literal = max(literal.forward, literal.reverse)
        out.metrics["literal_intertwining"] = worst_literal
        out.report(ctx, "crofoot.literal_formula", worst_literal, 0.0, t.intertwining_tol, worst_literal > t.intertwining_tol)
        return out

    def _task_zero(self, ctx: _Context) -> _Outcome:
        t = ctx.tolerances
        b1, b2 = ctx.bases
        report = zero_equivalence_check(ctx.phi, b1, b2, t.op_zero_rel, t.sym_zero_rel)
        out = _Outcome(
            metrics={
                "op_norm": report.op_norm,
                "residual": report.residual,
                "phi_norm": report.phi_norm,
                "op_zero": float(report.op_zero),
                "sym_zero": float(report.sym_zero),
                "outside_hypotheses": float(ctx.theta1.outside_hypotheses or ctx.theta2.outside_hypotheses),
            }
        )
        out.report(
            ctx, "zerosym.equivalence", report.op_norm, report.residual, t.op_zero_rel * report.phi_norm, not report.consistent
        )
        reference = build(b1, b2, ctx.phi).mat
        scale = max(matops.operator_norm(reference), t.op_zero_rel * report.phi_norm, np.finfo(float).tiny)
        psi1, psi2 = symbol_pair(ctx.phi, ctx.theta1, ctx.theta2)
        out.metrics.update(membership_pattern(psi1, psi2, ctx.theta1, ctx.theta2))
        x = sampling.random_cmat(ctx.rng("zero"), ctx.scenario.d, ctx.scenario.d)

        def drift(pair: tuple[cf.CircleFn, cf.CircleFn]) -> float:
            return matops.operator_norm(build(b1, b2, combine_pair(*pair)).mat - reference) / scale

        out.require("pair_drift", drift((psi1, psi2)), t.shift_tol)
        out.require("shift_drift", drift(class_shift(psi1, psi2, x, ctx.theta1, ctx.theta2)), t.shift_tol)
        literal = drift(class_shift(psi1, psi2, x, ctx.theta1, ctx.theta2, ShiftOrder.LITERAL))
        out.metrics["literal_shift_drift"] = literal
        out.report(ctx, "zerosym.literal_shift", literal, 0.0, t.shift_tol, literal > t.shift_tol)
        return out

    def _task_dim(self, ctx: _Context) -> _Outcome:
        b1, b2 = ctx.bases
        report = tto_space_dim(b1, b2, ctx.tolerances.dim_rel_tol)
        out = _Outcome(
            metrics={
                "computed": report.computed,
                "paper_formula": report.paper_formula,
                "column_formula": report.column_formula,
                "saturated": float(report.saturated),
                "m": report.m,
                "n": report.n,
                "d": report.d,
            }
        )
        if not report.saturated:
            out.failed.append(f"rank count not saturated at cutoff {report.cutoff}")
        if report.computed != report.column_formula:
            out.failed.append(f"computed {report.computed} != d m + d n - d^2 = {report.column_formula}")
        out.report(ctx, "zerosym.dimension_formula", report.computed, report.paper_formula, 0.0, not report.formula_agrees)
        return out

    def _task_selftest(self, ctx: _Context) -> _Outcome:
        if self.selftest_service is None:
            from mskit.services.selftest_service import SelftestServiceImpl

            self.selftest_service = SelftestServiceImpl(config_service=self.config_service)
        results = self.selftest_service.run("quick")
        failing = [result.name for result in results if not result.passed]
        out = _Outcome(
            metrics={
                "checks": len(results),
                "failed": len(failing),
            }
        )
        out.failed.extend(f"{name} failed" for name in failing)
        out.findings.extend(finding for result in results for finding in result.findings)
        return out
