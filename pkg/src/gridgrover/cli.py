"""Command-line entry point.

Subcommands:

* ``run``      one simulation from a config file, artifacts to --out
* ``sweep``    expand the config's sweep lists, one artifact dir per point
* ``table``    rerun the reference result series and print the comparison
* ``grover``   complete-graph reference trace for the config's grid
* ``validate`` check the config's tessellations cover the grid exactly
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, make_partition, parse_config
from .experiments import TABLE_SIZES, run_experiment, table_report
from .grid import GridGeometry, cell_index
from .outputs import (
    HeatmapStyle,
    emit_heatmap,
    emit_partition_csv,
    emit_snapshot_csv,
    emit_trace_csv,
)
from .simulator import default_horizon, default_marked_cell, run_grover_reference
from .tessellation import validate_partition

__all__ = ["main"]


def _add_common_flags(parser: argparse.ArgumentParser, config_required: bool) -> None:
    parser.add_argument("--config", type=Path, required=config_required,
                        help="path to a key = value config file")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--order", choices=("rtl", "ltr"), default=None,
                        help="round reading: rtl (dispersion first) or ltr (oracle first)")
    parser.add_argument("--snapshots", type=int, default=None, metavar="STRIDE",
                        help="iterations between stored grids (0 disables)")
    parser.add_argument("--max-iters", type=int, default=None, metavar="K",
                        help="horizon override (default 4 * L)")


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    text = args.config.read_text()
    config = parse_config(text)
    return config.with_overrides(
        out_dir=str(args.out) if args.out is not None else None,
        order=args.order,
        snapshot_stride=args.snapshots,
        max_iterations=args.max_iters,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if args.command == "run":
        # run executes the base point only; sweep expands the sweep lists
        config = dataclasses.replace(
            config, sweep_n=(), sweep_d=(), sweep_tessellation=(), sweep_marked=()
        )
    report = run_experiment(config)
    sys.stdout.write(report.render())
    return 0 if report.ok else 1


def _cmd_table(args: argparse.Namespace) -> int:
    orders = ("rtl", "ltr") if args.order is None else (args.order,)
    report = table_report(
        out_dir=args.out, orders=orders, sizes=TABLE_SIZES, max_iterations=args.max_iters
    )
    sys.stdout.write(report.render())
    return 0


def _cmd_grover(args: argparse.Namespace) -> int:
    config = _load_config(args)
    geometry = GridGeometry(config.side)
    n = geometry.cell_count
    cells = config.marked_cells
    if cells is None:
        cells = (tuple(default_marked_cell(geometry)),)
    indices = sorted(cell_index(geometry, c) for c in cells)
    iterations = config.max_iterations or default_horizon(geometry)
    trace = run_grover_reference(
        n,
        len(indices),
        iterations,
        marked_indices=indices,
        snapshot_stride=config.snapshot_stride,
    )
    peak = trace.peak
    sys.stdout.write(
        f"grover reference: n={n} marked={len(indices)} "
        f"peak probability {peak.probability:.6f} at round {peak.iteration}\n"
    )
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        emit_trace_csv(trace, args.out / "grover_trace.csv")
        if config.snapshot_stride and trace.snapshots:
            style = HeatmapStyle(scale=config.heatmap_scale)
            for iteration, grid in sorted(trace.snapshots.items()):
                emit_snapshot_csv(grid, args.out / f"grover_snapshot_iter{iteration:05d}.csv")
                if config.emit_heatmaps:
                    emit_heatmap(grid, style, args.out / f"grover_heatmap_iter{iteration:05d}.ppm")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    geometry = GridGeometry(config.side)
    exit_code = 0
    for role, kind in (("local", config.local_kind), ("dispersion", config.dispersion_kind)):
        partition = make_partition(geometry, kind, config.d)
        report = validate_partition(partition)
        sys.stdout.write(
            f"{role} ({kind}, d={config.d}): {report.summary()} "
            f"[{partition.group_count} groups]\n"
        )
        if not report.ok:
            exit_code = 1
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            emit_partition_csv(partition, args.out / f"partition_{role}.csv")
    return exit_code


def main(argv: "list[str] | None" = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gridgrover",
        description="Quantum search on a cyclic 2D grid via tessellated diffusion rounds.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="single simulation from a config file")
    _add_common_flags(run_parser, config_required=True)
    run_parser.set_defaults(handler=_cmd_run)

    sweep_parser = commands.add_parser("sweep", help="expand the config's sweep lists")
    _add_common_flags(sweep_parser, config_required=True)
    sweep_parser.set_defaults(handler=_cmd_run)

    table_parser = commands.add_parser("table", help="rerun the reference result series")
    _add_common_flags(table_parser, config_required=False)
    table_parser.set_defaults(handler=_cmd_table)

    grover_parser = commands.add_parser("grover", help="complete-graph reference trace")
    _add_common_flags(grover_parser, config_required=True)
    grover_parser.set_defaults(handler=_cmd_grover)

    validate_parser = commands.add_parser("validate", help="check the config's tessellations")
    _add_common_flags(validate_parser, config_required=True)
    validate_parser.set_defaults(handler=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
