"""Command-line interface.

Exit codes: 0 on success, 1 on runtime failure, 2 on usage, configuration or
malformed-input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
from dotenv import load_dotenv
from loguru import logger

from . import __version__
from .config.manager import load_config
from .config.schema import OutputFormat
from .errors import ConfigError, ExplorerError, MalformedInputError
from .experiments import EXPERIMENTS, SWEEP_SEEDS, ExperimentOptions, get_experiment
from .explorer import MemorySink, run
from .geometry import BoundingBox
from .metrics import build_report, format_report, min_pairwise_distance
from .storage import JsonlRecordSink, read_samples, write_json, write_samples
from .utils.logger import configure_logging

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def cmd_run(args: argparse.Namespace) -> int:
    """Run the exploration loop from a config file and write its outputs."""
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.output_dir is not None:
        overrides.append(f"output_dir={json.dumps(str(args.output_dir))}")
    if args.format is not None:
        overrides.append(f"output_format={json.dumps(args.format)}")
    config = load_config(args.config, overrides)
    output_dir = config.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)

    started = time.perf_counter()
    if config.emit_per_iteration:
        with JsonlRecordSink(output_dir / "iterations.jsonl") as sink:
            dataset, records = run(config.explorer, sink=sink)
    else:
        dataset, records = run(config.explorer, sink=MemorySink())
        with JsonlRecordSink(output_dir / "iterations.jsonl") as sink:
            for record in records:
                sink.emit(record)
    wall_time = time.perf_counter() - started

    fmt = config.output_format.value
    samples_path = write_samples(dataset.rows(), output_dir / f"samples.{fmt}", fmt)
    summary = {
        "final_n": len(dataset),
        "warmup_size": config.explorer.warmup_size,
        "iterations": len(records),
        "admitted": sum(r.admitted for r in records),
        "dropped": sum(r.dropped for r in records),
        "wall_time_seconds": wall_time,
        "min_pairwise_distance": min_pairwise_distance(dataset.coords()),
        "seed": config.explorer.seed,
    }
    write_json(output_dir / "summary.json", summary)
    logger.info(
        f"Run complete: {summary['final_n']} points after {summary['iterations']} iterations, "
        f"samples written to {samples_path}"
    )
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    """Run a named experiment preset."""
    runner = get_experiment(args.name)
    if runner is None:
        logger.error(f"Unknown experiment {args.name!r}; choose from {sorted(EXPERIMENTS)}")
        return EXIT_USAGE
    options = ExperimentOptions(
        seed=args.seed,
        output_dir=Path(args.output_dir or f"runs/{args.name}"),
        output_format=OutputFormat(args.format or OutputFormat.JSONL.value),
        iterations=args.iterations,
        batch_size=args.batch,
        full=args.full,
        num_seeds=args.seeds,
    )
    result = runner(options)
    for path in result.files:
        logger.info(f"Wrote {path}")
    logger.info(f"Experiment {result.name} finished: {json.dumps(result.summary)}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    """Print spacing and coverage metrics for a sample log."""
    rows = read_samples(args.samples)
    dimension = len(rows[0].coords)
    box = _parse_bounds(args.bounds, dimension) if args.bounds else None
    print(format_report(build_report(rows, box)))

    if dimension == 2:
        samples = Path(args.samples)
        plot_path = Path(args.plot_csv or samples.with_name(f"{samples.stem}.plot.csv"))
        frame = pd.DataFrame(
            {
                "x": [r.coords[0] for r in rows],
                "y": [r.coords[1] for r in rows],
                "iteration": [r.iteration for r in rows],
            }
        )
        plot_path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(plot_path, index=False, float_format="%.17g", lineterminator="\n")
        logger.info(f"Plot data written to {plot_path}")
    return EXIT_OK


def _parse_bounds(text: str, dimension: int) -> BoundingBox:
    """Parse ``min_0,...,min_{m-1},max_0,...,max_{m-1}``."""
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"not a list of numbers: {text!r}", field="--bounds") from None
    if len(values) != 2 * dimension:
        raise ConfigError(
            f"expected {2 * dimension} numbers for a {dimension}-D log, got {len(values)}",
            field="--bounds",
        )
    try:
        return BoundingBox(tuple(values[:dimension]), tuple(values[dimension:]))
    except ExplorerError as e:
        raise ConfigError(str(e), field="--bounds") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="design-explorer",
        description="Design-space exploration with robust random cut forests",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Log level for messages and library events",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run the exploration loop from a config file")
    run_parser.add_argument("config", help="Path to a JSON config file")
    run_parser.add_argument("--seed", type=int, default=None, help="Override the seed")
    run_parser.add_argument("--output-dir", default=None, help="Override the output directory")
    run_parser.add_argument(
        "--format", choices=[f.value for f in OutputFormat], default=None, help="Sample log format"
    )
    run_parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="Override a config value; dotted keys allowed (repeatable)",
    )
    run_parser.set_defaults(func=cmd_run)

    exp_parser = subparsers.add_parser("experiment", help="Run an experiment preset")
    exp_parser.add_argument("name", help=f"One of: {', '.join(EXPERIMENTS)}")
    exp_parser.add_argument("--seed", type=int, default=0)
    exp_parser.add_argument("--output-dir", default=None)
    exp_parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    exp_parser.add_argument("--iterations", type=int, default=None, help="long-run iterations")
    exp_parser.add_argument("--batch", type=int, default=None, help="Peripheral points per iteration")
    exp_parser.add_argument(
        "--full", action="store_true", help="long-run: 2000 iterations instead of 100"
    )
    exp_parser.add_argument(
        "--seeds", type=int, default=SWEEP_SEEDS, help="epsilon-sweep: number of seeds averaged"
    )
    exp_parser.set_defaults(func=cmd_experiment)

    report_parser = subparsers.add_parser("report", help="Summarise a sample log")
    report_parser.add_argument("samples", help="Path to samples.jsonl or samples.csv")
    report_parser.add_argument(
        "--bounds", default=None, help="Coverage grid box as min_0,..,min_m,max_0,..,max_m"
    )
    report_parser.add_argument("--plot-csv", default=None, help="Where to write x,y,iteration CSV")
    report_parser.set_defaults(func=cmd_report)
    return parser


def _configure_cli_logging(level: str | None) -> None:
    name = (level or "INFO").upper()
    logger.remove()
    logger.add(sys.stderr, level=name, format="<level>{level}</level>: {message}")
    configure_logging(level)


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    _configure_cli_logging(args.log_level)
    try:
        return args.func(args)
    except (ConfigError, MalformedInputError) as e:
        logger.error(f"{e}")
        return EXIT_USAGE
    except ExplorerError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
