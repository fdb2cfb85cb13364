"""Command-line interface for numrad."""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .bounds import (
    BoundParams,
    OperandShape,
    compare_tightness,
    evaluate_bound,
    get_entry,
    list_bounds,
    resolve_bound_id,
)
from .config import SuiteConfig
from .errors import NumradError
from .harness import REPORT_FORMATS, emit_report, run_suite, sharpness_suite, write_report
from .matrix import BlockMatrix2x2, load_matrix
from .numrange import DEFAULT_GRID, RADIUS_METHODS, radius_by_method
from .utils import setup_logging

logger = logging.getLogger("numrad")

# Status and errors go to stderr; stdout carries reports only
console = Console(stderr=True)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

DEFAULT_EVAL_TOL = 1e-9


def _error(message: str) -> None:
    console.print(Panel(f"❌ {message}", title="[bold red]Error", border_style="red"))


def handle_errors(func):
    """Map library and I/O errors to a red panel and exit code 2."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (NumradError, OSError) as e:
            _error(str(e))
            sys.exit(EXIT_USAGE)
    return wrapper


def _param_literals(gauge, alpha, alpha2, p, r, n) -> Dict[str, Any]:
    literals = {"gauge": gauge, "alpha": alpha, "alpha2": alpha2, "p": p, "r": r, "n": n}
    return {k: v for k, v in literals.items() if v is not None}


def _load_operands(matrix: Optional[str], blocks: Sequence[str]) -> Tuple[Optional[Any], Optional[BlockMatrix2x2]]:
    """
    Resolve ``--matrix``/``--blocks`` into a single operator and a block carrier.

    With ``--blocks`` the single operator is block ``a``. With ``--matrix``
    alone the carrier holds the quadrants of an even-sized matrix, or is None.
    """
    if blocks:
        carrier = BlockMatrix2x2(*(load_matrix(path) for path in blocks))
        return carrier.a, carrier
    if matrix is None:
        raise click.UsageError("Provide --matrix or --blocks")
    m = load_matrix(matrix)
    carrier = BlockMatrix2x2.from_quadrants(m) if m.shape[0] == m.shape[1] and m.shape[0] % 2 == 0 else None
    return m, carrier


def _operands_for(bound_id, single, carrier):
    if get_entry(bound_id).shape is OperandShape.SINGLE:
        return single
    return carrier


def _selected_ids(spec: str) -> List:
    if spec.strip().lower() == "all":
        return [entry.id for entry in list_bounds()]
    return [resolve_bound_id(part) for part in spec.split(",") if part.strip()]


matrix_option = click.option("--matrix", "-m", type=click.Path(exists=True, dir_okay=False),
                             help="Matrix JSON file")
blocks_option = click.option("--blocks", nargs=4, type=click.Path(exists=True, dir_okay=False), default=None,
                             help="Four block files a b c d")


def param_options(func):
    """Bound parameter options shared by eval and compare."""
    options = [
        click.option("--gauge", help="Gauge literal, e.g. power:r=2, expm1:s=1, hinge:c=0.5"),
        click.option("--alpha", type=float, help="Factor exponent: f(t) = t^alpha, g(t) = t^(1-alpha)"),
        click.option("--alpha2", type=float, help="Exponent of the second factor pair (defaults to --alpha)"),
        click.option("--p", "p", type=float, help="Hölder exponent p > 1; q = p/(p-1)"),
        click.option("--r", "r", type=float, help="Power r"),
        click.option("--n", "n", type=int, help="Power n for the power inequality"),
        click.option("--tol", type=float, default=DEFAULT_EVAL_TOL, show_default=True,
                     help="Relative numerical radius tolerance"),
        click.option("--grid", type=int, default=DEFAULT_GRID, show_default=True, help="Initial theta grid"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.version_option(__version__, prog_name="numrad")
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.option("--log-file", type=click.Path(dir_okay=False), help="Also write logs to this file")
def cli(verbose, log_file):
    """Numerical radius computation and inequality validation."""
    setup_logging(verbose, log_file)


@cli.command(name="eval")
@matrix_option
@blocks_option
@click.option("--bound", "-b", default="all", show_default=True, help="Bound id or 'all'")
@param_options
@handle_errors
def eval_command(matrix, blocks, bound, gauge, alpha, alpha2, p, r, n, tol, grid):
    """Evaluate bounds on a matrix and print the reports as JSON."""
    single, carrier = _load_operands(matrix, blocks)
    literals = _param_literals(gauge, alpha, alpha2, p, r, n)
    overrides = BoundParams.from_dict(literals) if literals else None

    reports = []
    for bound_id in _selected_ids(bound):
        operands = _operands_for(bound_id, single, carrier)
        if operands is None:
            if bound.strip().lower() != "all":
                raise click.UsageError(f"{bound_id.value} needs block operands: pass --blocks or an even-sized --matrix")
            logger.warning(f"Skipping {bound_id.value}: needs block operands")
            continue
        reports.append(evaluate_bound(bound_id, operands, overrides, tol=tol, grid=grid))

    click.echo(json.dumps([report.to_dict() for report in reports], indent=2))
    violated = [rep.id.value for rep in reports if rep.hypotheses_ok and not rep.holds]
    if violated:
        _error(f"Violated: {', '.join(violated)}")
        sys.exit(EXIT_VIOLATION)


@cli.command()
@click.option("--suite", "-s", type=click.Path(exists=True, dir_okay=False),
              help="Suite configuration (JSON or YAML); defaults to .numrad.* in the current directory")
@click.option("--jobs", "-j", type=click.IntRange(min=1), help="Worker threads")
@click.option("--trials", type=click.IntRange(min=1), help="Override trials per bound")
@click.option("--seed", type=int, help="Override the master seed")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write the report here (.json, .csv or .txt)")
@click.option("--format", "fmt", type=click.Choice(REPORT_FORMATS), default="text", show_default=True,
              help="Report format on stdout")
@click.option("--progress", is_flag=True, help="Show progress bars")
@handle_errors
def check(suite, jobs, trials, seed, out, fmt, progress):
    """Run the validation suite; exit 0 iff no trial fails."""
    config_path = Path(suite) if suite else SuiteConfig.find_config_file(Path.cwd())
    config = SuiteConfig.load(config_path) if config_path else SuiteConfig()
    config.apply_env()
    if jobs is not None:
        config.jobs = jobs
    if trials is not None:
        config.trials = trials
    if seed is not None:
        config.master_seed = seed

    console.print(Panel(f"🔍 Running {len(config.bound_ids())} bounds × {config.trials} trials "
                        f"and {len(config.properties)} property checks", border_style="blue"))
    report = run_suite(config, show_progress=progress)

    out = out or config.output_path
    if out:
        write_report(report, out)
    click.echo(emit_report(report, fmt).decode("utf-8"), nl=False)

    if not report.ok:
        _error(f"{report.total_failures} of {report.total_trials} trials failed")
        sys.exit(EXIT_VIOLATION)
    console.print(Panel(f"✅ All {report.total_trials} trials passed", border_style="green"))


@cli.command()
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write the report here (.json, .csv or .txt)")
@click.option("--trials", type=click.IntRange(min=1), default=200, show_default=True,
              help="Random matrices per equality case")
@click.option("--seed", type=int, help="Master seed")
@click.option("--jobs", "-j", type=click.IntRange(min=1), default=1, help="Worker threads")
@handle_errors
def sharpness(out, trials, seed, jobs):
    """Check the equality cases of the sharp inequalities."""
    kwargs = {"trials": trials, "jobs": jobs}
    if seed is not None:
        kwargs["master_seed"] = seed
    report = sharpness_suite(**kwargs)
    if out:
        write_report(report, out)
    click.echo(emit_report(report, "text").decode("utf-8"), nl=False)
    if not report.ok:
        sys.exit(EXIT_VIOLATION)


@cli.command()
@matrix_option
@blocks_option
@click.option("--bounds", "bound_list", required=True, help="Comma-separated bound ids")
@param_options
@click.option("--json", "as_json", is_flag=True, help="Output as JSON")
@handle_errors
def compare(matrix, blocks, bound_list, gauge, alpha, alpha2, p, r, n, tol, grid, as_json):
    """Rank bounds by their right-hand side on one input."""
    single, carrier = _load_operands(matrix, blocks)
    ids = _selected_ids(bound_list)
    shapes = {get_entry(bound_id).shape is OperandShape.SINGLE for bound_id in ids}
    if len(shapes) > 1:
        raise click.UsageError("compare needs bounds that read the same operands")
    operands = single if shapes == {True} else carrier
    if operands is None:
        raise click.UsageError("These bounds need block operands: pass --blocks or an even-sized --matrix")

    literals = _param_literals(gauge, alpha, alpha2, p, r, n)
    overrides = BoundParams.from_dict(literals) if literals else None
    ranking = compare_tightness(ids, operands, {bound_id: overrides for bound_id in ids} if overrides else None,
                                tol=tol, grid=grid)

    if as_json:
        click.echo(json.dumps([entry.to_dict() for entry in ranking], indent=2))
        return

    table = Table(title="Tightness ranking")
    table.add_column("Rank", justify="right")
    table.add_column("Bound", style="cyan")
    table.add_column("rhs", justify="right")
    table.add_column("slack", justify="right")
    for rank, entry in enumerate(ranking, start=1):
        table.add_row(str(rank), entry.id.value, f"{entry.rhs:.10g}", f"{entry.slack:.3e}")
    Console().print(table)


@cli.command()
@click.option("--matrix", "-m", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Matrix JSON file")
@click.option("--method", type=click.Choice(RADIUS_METHODS), default="sweep", show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True, help="Relative tolerance for the sweep")
@click.option("--grid", type=int, default=DEFAULT_GRID, show_default=True, help="Initial theta grid")
@click.option("--restarts", type=click.IntRange(min=1), default=32, show_default=True,
              help="Rayleigh ascent restarts")
@click.option("--seed", type=int, default=0, show_default=True, help="Rayleigh ascent seed")
@handle_errors
def radius(matrix, method, tol, grid, restarts, seed):
    """Compute the numerical radius of a matrix."""
    m = load_matrix(matrix)
    result = radius_by_method(m, method=method, tol=tol, restarts=restarts, seed=seed, grid=grid)
    click.echo(json.dumps(result.to_dict(), indent=2))


@cli.command(name="list")
@click.option("--json", "as_json", is_flag=True, help="Output as JSON")
def list_command(as_json):
    """List the bound catalog."""
    entries = list_bounds()
    if as_json:
        click.echo(json.dumps([entry.to_dict() for entry in entries], indent=2))
        return

    table = Table(title=f"Bound catalog ({len(entries)} entries)")
    table.add_column("Id", style="cyan")
    table.add_column("Alias")
    table.add_column("Shape")
    table.add_column("Direction")
    table.add_column("Params")
    table.add_column("Inequality")
    for entry in entries:
        table.add_row(entry.id.value, entry.alias, entry.shape.value, entry.direction.value,
                      ", ".join(entry.required) or "-", entry.anchor)
    Console().print(table)


def main():
    cli()


if __name__ == "__main__":
    main()
