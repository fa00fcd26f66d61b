"""Command-line interface for the near-field DAP toolkit.

Each subcommand builds a SweepConfig from an optional key-value file or a
figure preset, applies the flag overrides, and runs one tool coroutine.
Tables go to ``--out`` when given and to stdout otherwise.
"""

import asyncio
import json
import logging
from pathlib import Path
from typing import Annotated, Any, NoReturn

import typer

from nearfield_dap.config import SweepConfig
from nearfield_dap.models.errors import DapError

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="nearfield-dap",
    help="Near-field XL-MIMO DoF, capacity and distance-aware precoding experiments.",
    no_args_is_help=True,
    add_completion=False,
)

ConfigOption = Annotated[
    Path | None, typer.Option("--config", help="Key-value experiment file")
]
FigureOption = Annotated[
    str | None, typer.Option("--figure", help="Start from a figure preset (fig2..fig8)")
]
OutOption = Annotated[Path | None, typer.Option("--out", help="Output CSV path")]
DistancesOption = Annotated[
    str | None, typer.Option("--distances", help="Comma-separated distances in meters")
]
SnrsOption = Annotated[str | None, typer.Option("--snrs", help="Comma-separated SNRs in dB")]
QuadratureOption = Annotated[
    int | None, typer.Option("--quadrature-order", help="Gauss-Legendre order")
]
DistanceOption = Annotated[
    float | None, typer.Option("--distance", help="Single link distance in meters")
]
SnrOption = Annotated[float | None, typer.Option("--snr", help="Single SNR in dB")]


def _fail(message: str) -> NoReturn:
    typer.echo(f"error: {message}", err=True)
    raise typer.Exit(code=1)


def load_config(
    config_path: Path | None,
    figure: str | None,
    distances: str | None,
    snrs: str | None,
    quadrature_order: int | None,
    output_path: Path | None = None,
) -> SweepConfig:
    """Build the configuration: file, else preset, else defaults, then overrides."""
    if config_path is not None:
        base = SweepConfig.from_file(config_path)
    elif figure is not None:
        base = SweepConfig.preset(figure)
    else:
        base = SweepConfig()
    return base.with_overrides(
        distances=distances,
        snrs_db=snrs,
        quadrature_order=quadrature_order,
        output_path=output_path,
    )


def _config_or_exit(**kwargs: Any) -> SweepConfig:
    try:
        return load_config(**kwargs)
    except DapError as e:
        _fail(str(e))


def _emit(result: dict[str, Any]) -> None:
    """Print a tool result, exiting with status 1 on an error dictionary."""
    if "error" in result:
        _fail(str(result["error"]))

    summary = {key: value for key, value in result.items() if key not in ("rows", "columns")}
    if "rows" in result and result.get("output_path") is None:
        from nearfield_dap.services.figures import FigureData

        typer.echo(FigureData.to_csv(result["rows"], result["columns"]), nl=False)
        typer.echo(json.dumps(summary, default=str), err=True)
    else:
        typer.echo(json.dumps(summary, default=str))


@app.command()
def dof(
    distance: DistanceOption = None,
    count: Annotated[int | None, typer.Option(help="Number of eigenvalues")] = None,
    config: ConfigOption = None,
    figure: FigureOption = None,
    out: OutOption = None,
    distances: DistancesOption = None,
    snrs: SnrsOption = None,
    quadrature_order: QuadratureOption = None,
) -> None:
    """Dump the PSWF eigenvalue spectrum and DoF estimate of a link."""
    from nearfield_dap.tools.analysis import compute_dof

    cfg = _config_or_exit(
        config_path=config,
        figure=figure,
        distances=distances,
        snrs=snrs,
        quadrature_order=quadrature_order,
    )
    _emit(asyncio.run(compute_dof(cfg, distance, count, out)))


@app.command()
def capacity(
    config: ConfigOption = None,
    figure: FigureOption = None,
    out: OutOption = None,
    distances: DistancesOption = None,
    snrs: SnrsOption = None,
    quadrature_order: QuadratureOption = None,
) -> None:
    """Tabulate exact, PSWF-estimated and equal-power capacity over distance."""
    from nearfield_dap.tools.analysis import compute_capacity

    cfg = _config_or_exit(
        config_path=config,
        figure=figure,
        distances=distances,
        snrs=snrs,
        quadrature_order=quadrature_order,
    )
    _emit(asyncio.run(compute_capacity(cfg, out)))


@app.command()
def precode(
    distance: DistanceOption = None,
    snr: SnrOption = None,
    streams: Annotated[
        int | None, typer.Option(help="Fixed stream count instead of the PSWF choice")
    ] = None,
    channel_out: Annotated[
        Path | None, typer.Option("--channel-out", help="Store the channel as .npz")
    ] = None,
    config: ConfigOption = None,
    figure: FigureOption = None,
    out: OutOption = None,
    distances: DistancesOption = None,
    snrs: SnrsOption = None,
    quadrature_order: QuadratureOption = None,
) -> None:
    """Run the DAP pipeline on one link and report streams, subarrays and SE."""
    from nearfield_dap.tools.precoding import precode as _precode

    cfg = _config_or_exit(
        config_path=config,
        figure=figure,
        distances=distances,
        snrs=snrs,
        quadrature_order=quadrature_order,
    )
    _emit(asyncio.run(_precode(cfg, distance, snr, streams, out, channel_out)))


@app.command()
def compare(
    distance: DistanceOption = None,
    snr: SnrOption = None,
    config: ConfigOption = None,
    figure: FigureOption = None,
    out: OutOption = None,
    distances: DistancesOption = None,
    snrs: SnrsOption = None,
    quadrature_order: QuadratureOption = None,
) -> None:
    """Compare SE and EE of the configured architectures on one link."""
    from nearfield_dap.tools.experiments import compare_architectures

    cfg = _config_or_exit(
        config_path=config,
        figure=figure,
        distances=distances,
        snrs=snrs,
        quadrature_order=quadrature_order,
    )
    _emit(asyncio.run(compare_architectures(cfg, distance, snr, out)))


@app.command()
def sweep(
    config: ConfigOption = None,
    figure: FigureOption = None,
    out: OutOption = None,
    distances: DistancesOption = None,
    snrs: SnrsOption = None,
    quadrature_order: QuadratureOption = None,
) -> None:
    """Evaluate the full distance x SNR x architecture sweep and write its CSV."""
    from nearfield_dap.tools.experiments import sweep as _sweep

    cfg = _config_or_exit(
        config_path=config,
        figure=figure,
        distances=distances,
        snrs=snrs,
        quadrature_order=quadrature_order,
        output_path=out,
    )
    _emit(asyncio.run(_sweep(cfg)))


@app.command()
def figure(
    figure_id: Annotated[str, typer.Argument(help="fig2, fig3, fig5, fig6, fig7 or fig8")],
    config: ConfigOption = None,
    out: OutOption = None,
    distances: DistancesOption = None,
    snrs: SnrsOption = None,
    quadrature_order: QuadratureOption = None,
) -> None:
    """Write the data behind one figure, starting from its preset."""
    from nearfield_dap.tools.experiments import build_figure

    cfg = _config_or_exit(
        config_path=config,
        figure=figure_id,
        distances=distances,
        snrs=snrs,
        quadrature_order=quadrature_order,
        output_path=out,
    )
    _emit(asyncio.run(build_figure(cfg, figure_id)))
