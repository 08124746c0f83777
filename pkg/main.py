#!/usr/bin/env python3
"""
Main CLI for eikonal-lines

Compares the line energies of the viscosity solution and the competitor
microstructure on Omega(theta0), locates critical angles, and certifies the
constructed fields numerically.
"""

import logging
import math
from pathlib import Path
from typing import NoReturn, Optional

import typer
from rich import print
from rich.console import Console
from rich.markup import escape

from analysis import count_sign_changes, critical_angle, lsc_report, sweep_gap
from config import load_run_config
from constants import (
    CHECK_CSV_HEADER,
    CRITICAL_CSV_HEADER,
    ENERGY_CSV_HEADER,
    LSC_CSV_HEADER,
    SWEEP_CSV_HEADER,
    Verdict,
)
from costfn import parse_cost
from energy import summarize_gap
from errors import BracketSearchError, DomainError, EikonalLinesError
from fields import FieldDescriptor, competitor_field, one_d_transition, tiling_field, viscosity_field
from figures import plot_fields
from raster import certify_field
from util import read_theta_grid, write_csv_rows

logging.basicConfig(level=logging.WARNING, format="%(message)s")
logger = logging.getLogger(__name__)

app = typer.Typer(help="Line energies of eikonal fields on Omega(theta0)")
console = Console()

LSC_VIOLATION_LINE = "LSC VIOLATION CERTIFIED: lim E(m_n) < E(m_0)"
NO_LSC_VIOLATION_LINE = "NO LSC VIOLATION: lim E(m_n) >= E(m_0)"
DEFAULT_FIGURE = Path("eikonal_lines.svg")


class VerboseContext:
    """Context manager for verbose logging control"""

    def __init__(self, verbose: bool = False):
        self.verbose = verbose
        self.root = logging.getLogger()
        self.original_level = self.root.level
        self.root.setLevel(logging.DEBUG if verbose else logging.WARNING)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.root.setLevel(self.original_level)

    def log(self, message: str):
        """Log a message if verbose is enabled"""
        if self.verbose:
            logger.debug(message)


def fail(error: Exception) -> NoReturn:
    print(f"[red]Error: {escape(str(error))}[/red]")
    raise typer.Exit(1)


ConfigOption = typer.Option(None, "--config", help="Flat key = value config file; flags override it")
VerboseOption = typer.Option(False, "--verbose", help="Verbose output")
OutOption = typer.Option(None, "--out", help="Write the CSV here instead of stdout")
TolOption = typer.Option(None, "--tol", help="Tolerance (default: $EIKONAL_LINES_TOL or 1e-10)")
CostOption = typer.Option(None, "--cost", help="Jump cost: power:<p>, table:<path> or zero")
Theta0Option = typer.Option(None, "--theta0", help="Opening angle theta0 in (0, pi/2)")


@app.command()
def gap(
    cost: Optional[str] = CostOption,
    theta0: Optional[float] = Theta0Option,
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """Energy breakdown of both fields and the sign of the gap."""
    with VerboseContext(verbose) as ctx:
        try:
            run = load_run_config({"cost": cost, "theta0": theta0, "tol": tol, "out": out}, config)
            f = parse_cost(run.cost)
            summary = summarize_gap(f, run.require_theta0(), run.tol)
        except EikonalLinesError as e:
            fail(e)
        ctx.log(f"gap for {f.label} at theta0={summary.theta0!r}: {summary.gap!r}")
        write_csv_rows(ENERGY_CSV_HEADER, [summary.csv_row()], out=run.out)
        color = "green" if summary.verdict is Verdict.COMPETITOR_WINS else "yellow"
        print(f"[bold {color}]{summary.verdict.value}[/bold {color}]")


@app.command("critical-angle")
def critical_angle_command(
    p: Optional[float] = typer.Option(None, "--p", help="Exponent of the power cost t^p"),
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """Bisect the angle below which the competitor beats the viscosity solution."""
    with VerboseContext(verbose):
        try:
            run = load_run_config({"p": p, "tol": tol, "out": out}, config)
            if run.p is None:
                raise DomainError("the exponent is required (flag --p or config key 'p')")
            result = critical_angle(run.p, run.tol)
        except BracketSearchError as e:
            print(f"[red]Error: {escape(e.report())}[/red]")
            raise typer.Exit(1)
        except EikonalLinesError as e:
            fail(e)
        write_csv_rows(CRITICAL_CSV_HEADER, [result.csv_row()], out=run.out)
        if result.crossings > 1:
            print(f"[yellow]{result.crossings} sign changes on the scan; reported the largest[/yellow]")


@app.command()
def sweep(
    cost: Optional[str] = CostOption,
    thetas: Optional[str] = typer.Option(None, "--thetas", help="Comma separated theta0 values"),
    grid_file: Optional[Path] = typer.Option(None, "--grid-file", help="File with one theta0 per line"),
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """Gap and energies over a grid of angles."""
    with VerboseContext(verbose):
        try:
            run = load_run_config(
                {"cost": cost, "thetas": thetas, "grid_file": grid_file, "tol": tol, "out": out}, config
            )
            f = parse_cost(run.cost)
            if run.grid_file is not None:
                angles = read_theta_grid(run.grid_file)
            elif run.thetas:
                angles = run.thetas
            else:
                raise DomainError("no angles given (use --thetas or --grid-file)")
            rows = sweep_gap(f, angles, run.tol)
        except (EikonalLinesError, OSError) as e:
            fail(e)
        write_csv_rows(
            SWEEP_CSV_HEADER,
            [[r.theta0, r.gap, r.E_viscosity, r.E_competitor, r.I1, r.I2, r.I3] for r in rows],
            out=run.out,
        )
        if run.out is not None:
            print(f"Wrote {len(rows)} rows to {run.out}; the gap changes sign {count_sign_changes(rows)} times")


@app.command()
def lsc(
    cost: Optional[str] = CostOption,
    theta0: Optional[float] = Theta0Option,
    ns: Optional[str] = typer.Option(None, "--ns", help="Comma separated tiling sizes n"),
    grid: Optional[int] = typer.Option(None, "--grid", help="Raster cells per tile side"),
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """Energies and L1 distances of the tiling sequence against the 1D transition."""
    with VerboseContext(verbose):
        try:
            run = load_run_config(
                {"cost": cost, "theta0": theta0, "ns": ns, "grid": grid, "tol": tol, "out": out}, config
            )
            f = parse_cost(run.cost)
            report = lsc_report(run.require_theta0(), f, run.ns, run.grid, run.tol)
        except EikonalLinesError as e:
            fail(e)
        write_csv_rows(
            LSC_CSV_HEADER,
            [[row.n, row.energy, row.l1_distance] for row in report.rows],
            out=run.out,
        )
        console.print(f"E(m_0) = {report.energy_of_1d!r}, margin = {report.margin!r}", highlight=False)
        typer.echo(LSC_VIOLATION_LINE if report.lsc_violated else NO_LSC_VIOLATION_LINE)


def _check_targets(run, field_spec: Optional[Path]):
    if field_spec is not None:
        return [FieldDescriptor.loads(field_spec.read_text(encoding="utf-8")).build()]
    theta0 = run.theta0 if run.theta0 is not None else math.pi / 3
    return [
        viscosity_field(theta0),
        competitor_field(theta0),
        one_d_transition(theta0),
        tiling_field(theta0, run.n),
    ]


def _raster_path(base: Path, kind: str, count: int) -> Path:
    if count == 1:
        return base
    return base.with_name(f"{base.stem}_{kind}{base.suffix}")


@app.command()
def check(
    theta0: Optional[float] = Theta0Option,
    grid: Optional[int] = typer.Option(None, "--grid", help="Raster resolution per side"),
    n: Optional[int] = typer.Option(None, "--n", help="Tiling size for the tiling field"),
    rectangles: Optional[int] = typer.Option(None, "--rectangles", help="Number of random flux rectangles"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for the random rectangles"),
    field_spec: Optional[Path] = typer.Option(None, "--field-spec", help="Certify the single field in this descriptor file"),
    raster_out: Optional[Path] = typer.Option(None, "--raster-out", help="Dump the raster samples as CSV"),
    out: Optional[Path] = OutOption,
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """Unit-norm, flux, trace and tangency certificates for the constructed fields."""
    with VerboseContext(verbose) as ctx:
        try:
            run = load_run_config(
                {"theta0": theta0, "grid": grid, "n": n, "rectangles": rectangles, "seed": seed, "out": out},
                config,
            )
            targets = _check_targets(run, field_spec)
            certificates = []
            for field in targets:
                ctx.log(f"certifying {field.name}")
                field_certificates, raster = certify_field(field, run.grid, run.rectangles, run.seed)
                certificates.extend(field_certificates)
                if raster_out is not None:
                    raster.to_csv(_raster_path(raster_out, field.kind.value, len(targets)))
        except (EikonalLinesError, OSError) as e:
            fail(e)
        write_csv_rows(
            CHECK_CSV_HEADER,
            [certificate.csv_row() for certificate in certificates],
            out=run.out,
            comments=[f"seed={run.seed}"],
        )
        failed = [certificate for certificate in certificates if not certificate.passed]
        if failed:
            for certificate in failed:
                print(
                    f"[red]FAILED {escape(certificate.field)} {certificate.certificate}: "
                    f"{certificate.value:.3e} > {certificate.threshold:.0e}[/red]"
                )
            raise typer.Exit(1)
        print(f"[green]All {len(certificates)} certificates passed[/green]")


@app.command()
def plot(
    theta0: Optional[float] = Theta0Option,
    out: Optional[Path] = typer.Option(None, "--out", help=f"SVG output path (default: {DEFAULT_FIGURE})"),
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
):
    """Draw Omega(theta0) with m0 and m side by side."""
    with VerboseContext(verbose):
        try:
            run = load_run_config({"theta0": theta0, "out": out}, config)
            path = run.out or DEFAULT_FIGURE
            plot_fields(run.require_theta0(), path)
        except (EikonalLinesError, OSError) as e:
            fail(e)
        print(f"Figure written to {path}")


if __name__ == "__main__":
    app()
