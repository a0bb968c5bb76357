import json
import logging
import sys
import time
from typing import Annotated, NoReturn

import click
import typer

from mskit import __version__
from mskit.checks import LEVELS
from mskit.error_handling import ErrorHandler
from mskit.exceptions import ConfigurationError, MskitError, ValidationError
from mskit.operators.inner import inner_from_spec
from mskit.operators.model_space import basis
from mskit.operators.zerosym import tto_space_dim
from mskit.records import ReportRecord
from mskit.services import service_container
from mskit.services.interfaces import ConfigService, ReportService, ScenarioService, SelftestService
from mskit.services.schemas import REPORT_SCHEMA, SCENARIO_SCHEMA, parse_json
from mskit.services.selftest_service import format_summary
from mskit.tolerances import parse_tolerance_pairs
from mskit.utils import configure_logging, digest

logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_USAGE = 2

app = typer.Typer(
    help="🧮 mskit - model spaces, truncated Toeplitz operators and Crofoot transforms",
    no_args_is_help=True,
)

config_app = typer.Typer(help="⚙️  Show and change configuration")
app.add_typer(config_app, name="config")

# Get services from container
config_service = service_container.get(ConfigService)
scenario_service = service_container.get(ScenarioService)
selftest_service = service_container.get(SelftestService)


def _usage_error(error: MskitError, context: str) -> NoReturn:
    """Report a schema or configuration problem and exit without writing any report line."""
    ErrorHandler.handle_error(error, context)
    typer.echo(f"❌ {error.message}", err=True)
    if error.details:
        typer.echo(f"💡 {error.details}", err=True)
    sys.exit(EXIT_USAGE)


# CORE COMMANDS


@app.command("run")
def run_scenarios(
    scenarios: Annotated[list[str], typer.Argument(help="Scenario files or bundled scenario names")],
    out: Annotated[str | None, typer.Option("--out", "-o", help="Write the JSONL report to this file")] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="Override the scenario seed", min=0)] = None,
    grid: Annotated[int | None, typer.Option("--grid", help="Override the grid size M")] = None,
    tol: Annotated[list[str] | None, typer.Option("--tol", help="Tolerance override KEY=VAL (repeatable)")] = None,
    workers: Annotated[int | None, typer.Option("--workers", "-w", help="Scenarios run in parallel", min=1)] = None,
    quiet: Annotated[bool, typer.Option("--quiet", "-q", help="Only log warnings and errors")] = False,
) -> None:
    """▶️  Run scenario tasks and emit a JSONL report"""
    configure_logging(quiet)
    try:
        overrides = parse_tolerance_pairs(tol or [])
        config_service.get_tolerances().with_overrides(overrides)
        loaded = [scenario_service.load(name) for name in scenarios]
        results = scenario_service.run_many(
            loaded,
            seed=seed,
            grid=grid,
            tolerance_overrides=overrides,
            workers=workers if workers is not None else config_service.get_workers(),
        )
    except (ValidationError, ConfigurationError) as e:
        _usage_error(e, "Invalid scenario or option")

    report_service = service_container.get(ReportService)
    try:
        if out is not None:
            report_service.open(open(out, "w", encoding="utf-8"))
        for records in results:
            report_service.write_all(records)
    except OSError as e:
        typer.echo(f"❌ Cannot write report: {e}", err=True)
        ErrorHandler.handle_error(e, "Error writing report")
        sys.exit(EXIT_FAIL)
    finally:
        report_service.close()

    records = [record for batch in results for record in batch]
    failed = [f"{record.scenario}/{record.task}" for record in records if record.verdict == "fail"]
    findings = sum(1 for record in records if record.verdict == "finding")
    if not quiet:
        typer.echo(f"📋 {len(records)} record(s), {len(failed)} failed, {findings} with findings", err=True)
    if failed:
        typer.echo(f"❌ Failed: {', '.join(failed)}", err=True)
        sys.exit(EXIT_FAIL)


@app.command("selftest")
def selftest(
    level: Annotated[
        str,
        typer.Option(
            "--level", "-l", help="quick (d <= 2, 5 seeds) or full (d <= 3, 20 seeds)", click_type=click.Choice(sorted(LEVELS))
        ),
    ] = "quick",
    module: Annotated[str | None, typer.Option("--module", "-m", help="Only check one operator module")] = None,
    quiet: Annotated[bool, typer.Option("--quiet", "-q", help="Only log warnings and errors")] = False,
) -> None:
    """🧪 Run the invariant suites of every operator module"""
    configure_logging(quiet)
    start = time.perf_counter()
    try:
        results = selftest_service.run(level, module)
    except MskitError as e:
        _usage_error(e, "Selftest could not start")

    for row in format_summary(results):
        typer.echo(row)
    failed = [result for result in results if not result.passed]
    findings = [finding for result in results for finding in result.findings if finding.verdict == "finding"]
    typer.echo()
    typer.echo(f"⏱️  {len(results)} invariants in {time.perf_counter() - start:.1f} s, {len(findings)} finding(s)")
    if failed:
        for result in failed:
            if result.all_skipped:
                typer.echo(f"❌ {result.name}: every instance was skipped")
            else:
                seeds = ", ".join(str(seed) for seed in result.failing_seeds)
                typer.echo(f"❌ {result.name}: failing seeds {seeds}")
            for error in result.errors:
                typer.echo(f"   {error}")
        sys.exit(EXIT_FAIL)
    typer.echo("✅ All invariants hold.")


@app.command("dim")
def dimension(
    theta1: Annotated[str, typer.Option("--theta1", help="Inner function spec as JSON")],
    theta2: Annotated[str, typer.Option("--theta2", help="Inner function spec as JSON")],
    grid: Annotated[int | None, typer.Option("--grid", help="Grid size M")] = None,
    d: Annotated[int | None, typer.Option("--d", help="Expected matrix size", min=1)] = None,
) -> None:
    """📐 Dimension of the TTO space between two model spaces, as one report line"""
    configure_logging(quiet=True)
    try:
        specs = (parse_json(theta1, "--theta1"), parse_json(theta2, "--theta2"))
        size = grid if grid is not None else config_service.get_grid_size()
        tolerances = config_service.get_tolerances()
        thetas = [inner_from_spec(spec, size, config_service.get_max_zero(), tolerances) for spec in specs]
        if thetas[0].d != thetas[1].d or (d is not None and thetas[0].d != d):
            raise ValidationError(f"Inner functions have sizes {thetas[0].d} and {thetas[1].d}, expected equal sizes")
    except MskitError as e:
        _usage_error(e, "Invalid inner function spec")

    start = time.perf_counter()
    record = ReportRecord(
        task="dim",
        scenario="cli",
        seed=0,
        digest=digest({"theta1": specs[0], "theta2": specs[1], "M": size}),
    )
    try:
        t = tolerances
        b1, b2 = (basis(theta, rel_tol=t.rank_rel_tol, gram_tol=t.gram_tol, membership_tol=t.membership_tol) for theta in thetas)
        report = tto_space_dim(b1, b2, t.dim_rel_tol)
        record.metrics = {
            "computed": report.computed,
            "paper_formula": report.paper_formula,
            "column_formula": report.column_formula,
            "saturated": float(report.saturated),
            "m": report.m,
            "n": report.n,
            "d": report.d,
        }
        if not report.saturated or report.computed != report.column_formula:
            record.verdict = "fail"
        elif not report.formula_agrees:
            record.verdict = "finding"
    except MskitError as e:
        ErrorHandler.handle_error(e, "Dimension count failed")
        record.verdict = "fail"
        record.error = str(e)
    record.runtime_ms = (time.perf_counter() - start) * 1000.0
    service_container.get(ReportService).write(record)
    if record.verdict == "fail":
        sys.exit(EXIT_FAIL)


@app.command("schema")
def schema() -> None:
    """📜 Print the scenario and report JSON schemas"""
    typer.echo(json.dumps({"scenario": SCENARIO_SCHEMA, "report": REPORT_SCHEMA}, indent=2, sort_keys=True))


@app.command("list")
def list_items(
    checks: Annotated[bool, typer.Option("--checks", help="List invariant checks instead of scenarios")] = False,
    module: Annotated[str | None, typer.Option("--module", "-m", help="Only checks of this operator module")] = None,
) -> None:
    """📋 List bundled scenarios or invariant checks"""
    if checks:
        available = selftest_service.list_checks(module)
        if not available:
            typer.echo(f"No checks for module '{module}'." if module else "No checks available.")
            return
        typer.echo("🧪 Invariant checks:")
        typer.echo()
        width = max(len(name) for name in available)
        for name, description in available.items():
            typer.echo(f"  {name:<{width}}  {description}")
        return

    names = scenario_service.list_scenarios()
    if not names:
        typer.echo("No bundled scenarios available.")
        return
    typer.echo("📋 Bundled scenarios:")
    typer.echo()
    for name in names:
        try:
            tasks = ", ".join(scenario_service.load(name).tasks)
        except ValidationError as e:
            tasks = f"invalid: {e.message}"
        typer.echo(f"  {name:<24} {tasks}")


@app.command("version")
def show_version() -> None:
    """📦 Show version"""
    typer.echo(f"mskit {__version__}")


# CONFIGURATION COMMANDS


@config_app.command("show")
def show_config() -> None:
    """📋 Show effective configuration"""
    try:
        settings = config_service.as_dict()
    except ConfigurationError as e:
        _usage_error(e, "Error reading configuration")
    typer.echo("⚙️  Current Configuration:")
    typer.echo()
    typer.echo(f"Config file:  {settings['config_file']}")
    typer.echo(f"Grid size:    {settings['grid']['size']}")
    typer.echo(f"Max zero:     {settings['grid']['max_zero']}")
    typer.echo(f"Seed:         {settings['run']['seed']}")
    typer.echo(f"Workers:      {settings['run']['workers']}")
    typer.echo("Tolerances:")
    for key, value in settings["tolerances"].items():
        typer.echo(f"  {key:<20} {value:g}")


@config_app.command("set")
def set_config(
    key: Annotated[str, typer.Argument(help="grid.size, grid.max_zero, run.seed, run.workers or tolerances.<name>")],
    value: Annotated[str, typer.Argument(help="New value")],
) -> None:
    """✏️  Change one configuration value"""
    try:
        config_service.set_option(key, value)
    except ConfigurationError as e:
        _usage_error(e, "Error saving configuration")
    typer.echo(f"✅ {key} set to {value}.")


if __name__ == "__main__":
    app()
