# npspec/cli.py
"""
Command-line front end.

    npspec spectrum --analytic --kmax 3
    npspec spectrum --shape dilate.json --degree 8 --grid 32x64
    npspec variation --shape y20.json --k 1
    npspec fd-check --shape y20.json --k 1 --h 0.04,0.02
    npspec zeta --p 3 --kmax 1000000
    npspec halfsum --shape y20.json --h 0.02,0.04,0.08
    npspec serve --port 8000

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, TextIO

from pydantic import ValidationError

from npspec import __version__
from npspec.log import configure_logging
from npspec.models.config import GridSize, RunConfig
from npspec.models.results import Report
from npspec.models.shape import ShapeSpec
from npspec.services.base import DomainError, NPSpecError
from npspec.services.runs import (
    assembly_config,
    run_fd_check,
    run_halfsum,
    run_spectrum,
    run_spectrum_analytic,
    run_variation,
    run_zeta,
)
from npspec.settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def parse_h_list(text: str) -> tuple[float, ...]:
    """Comma-separated amplitudes, e.g. '0.04,0.02' or '-0.04,0.04'."""
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid amplitude list {text!r}") from e


def parse_grid(text: str) -> GridSize:
    try:
        return GridSize.parse(text)
    except (ValueError, ValidationError) as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def mirrored(h_values: tuple[float, ...]) -> tuple[float, ...]:
    """Close an amplitude list under h -> -h."""
    return tuple(sorted(set(h_values) | {-h for h in h_values}))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npspec",
        description="Neumann-Poincare spectra of spheres and perturbed spheres.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shape", type=Path, help="Shape file (JSON: {h, a: [{k, l, coeff}]}).")
    common.add_argument("--degree", type=int, help="Degree cap L of the Galerkin basis.")
    common.add_argument("--grid", type=parse_grid, help="Outer grid NTHETAxNPHI.")
    common.add_argument("--inner-grid", type=parse_grid, help="Inner rotated grid NTHETAxNPHI.")
    common.add_argument("--threads", type=int, help="Assembly worker threads (default: NPSPEC_THREADS).")
    common.add_argument("--tol", type=float, help="Override the pass/fail tolerance of the command.")
    common.add_argument("--out", type=Path, help="Output file (default: stdout).")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="Logging level (default: NPSPEC_LOG_LEVEL).")

    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", parents=[common], help="Sphere or Galerkin spectrum.")
    spectrum.add_argument("--analytic", action="store_true", help="Exact sphere eigenvalues.")
    spectrum.add_argument("--kmax", type=int, help="Last degree reported.")

    variation = sub.add_parser("variation", parents=[common], help="Variation matrix and equilibrium.")
    variation.add_argument("--k", type=int, help="Multiplet degree, k >= 1.")

    fd_check = sub.add_parser("fd-check", parents=[common], help="Formula slopes against FD slopes.")
    fd_check.add_argument("--k", type=int, help="Multiplet degree, k >= 1.")
    fd_check.add_argument("--h", type=parse_h_list, help="Amplitudes; positives are mirrored.")

    zeta = sub.add_parser("zeta", parents=[common], help="Spectral zeta sum of the sphere.")
    zeta.add_argument("--p", type=float, help="Exponent, p > 2.")
    zeta.add_argument("--kmax", type=int, help="Last degree of the partial sum.")

    halfsum = sub.add_parser("halfsum", parents=[common], help="Degree-1 multiplet sum Lambda(h).")
    halfsum.add_argument("--h", type=parse_h_list, help="Amplitudes.")

    serve = sub.add_parser("serve", help="Run the HTTP API.")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS)

    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge command-line arguments with settings; raises pydantic.ValidationError."""
    settings = get_settings()
    h_values = getattr(args, "h", None) or ()
    if args.command == "fd-check":
        h_values = mirrored(h_values)
    return RunConfig(
        command=args.command,
        analytic=getattr(args, "analytic", False),
        shape_path=args.shape,
        kmax=getattr(args, "kmax", None),
        k=getattr(args, "k", None),
        degree=args.degree if args.degree is not None else settings.degree_cap,
        grid=args.grid or GridSize(n_theta=settings.outer_theta, n_phi=settings.outer_phi),
        inner_grid=args.inner_grid or GridSize(n_theta=settings.inner_theta, n_phi=settings.inner_phi),
        h_values=h_values,
        p=getattr(args, "p", None),
        out=args.out,
        format=args.format,
        threads=args.threads if args.threads is not None else settings.threads,
        tol=args.tol,
    )


def execute(config: RunConfig) -> Report:
    """Run one resolved command."""
    if config.command == "zeta":
        return run_zeta(config.p, config.kmax)
    if config.command == "spectrum" and config.analytic:
        return run_spectrum_analytic(config.kmax if config.kmax is not None else config.degree)

    shape = ShapeSpec.from_file(config.shape_path)
    assembly = assembly_config(config.degree, config.grid, config.inner_grid, config.threads)
    if config.command == "spectrum":
        return run_spectrum(shape, assembly, config.kmax)
    if config.command == "variation":
        return run_variation(shape, config.k, config.tol)
    if config.command == "fd-check":
        return run_fd_check(shape, config.k, config.h_values, assembly, config.tol)
    return run_halfsum(shape, config.h_values, assembly)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def metadata(report: Report, config: RunConfig) -> dict[str, Any]:
    return {
        "command": report.command,
        "version": __version__,
        "config": config.model_dump(mode="json"),
        "summary": report.summary,
    }


def write_report(report: Report, config: RunConfig, stream: TextIO) -> None:
    """CSV with '#' metadata lines, or JSON {"metadata", "rows"}."""
    meta = metadata(report, config)
    if config.format == "json":
        json.dump({"metadata": meta, "columns": report.columns, "rows": report.rows}, stream, indent=2)
        stream.write("\n")
        return
    stream.write(f"# npspec {__version__} {report.command}\n")
    stream.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    stream.write(f"# summary: {json.dumps(meta['summary'], sort_keys=True)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_cell(row[column]) for column in report.columns])


def serve(host: str, port: int) -> int:
    import uvicorn

    settings = get_settings()
    uvicorn.run(
        "npspec.main:app",
        host=host,
        port=port,
        log_level=settings.log_level.lower(),
        access_log=settings.debug,
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(stream=sys.stderr, level=args.log_level)

    if args.command == "serve":
        return serve(args.host, args.port)

    try:
        config = resolve_config(args)
        report = execute(config)
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except DomainError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_CONFIG
    except NPSpecError as e:
        logger.error(f"{args.command} failed in {type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error(f"Cannot read input: {e}")
        return EXIT_CONFIG

    if config.out is None:
        write_report(report, config, sys.stdout)
    else:
        with config.out.open("w", encoding="utf-8", newline="") as fh:
            write_report(report, config, fh)
        logger.info(f"Wrote {len(report.rows)} rows to {config.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
