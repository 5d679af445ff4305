"""Command-line interface.

Subcommands:
    simulate  Generate a scenario and write its waveform (and truth) CSV
    estimate  Estimate the frequency of a waveform CSV
    compare   Score the estimators on a scenario and write a report
    catalog   List the built-in scenarios

Exit codes: 0 on success, 1 for invalid input (usage, validation, unknown
scenario, unsupported function), 2 for file errors (I/O and file format).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .core.config import (
    POSTFILTER_CUTOFF_HZ,
    PREFILTER_CUTOFF_HZ,
    EstimatorConfig,
    FilterSpec,
    ScenarioSpec,
)
from .core.enums import EstimatorId, FilterMode, WaveformSchema
from .core.errors import (
    ScenarioNotFoundError,
    UnsupportedSpecError,
    ValidationError,
    WaveformFormatError,
)
from .estimator import FrequencyEstimator
from .io import (
    format_report,
    read_estimator_config,
    read_scenario_file,
    read_waveform_csv,
    write_report,
    write_trace_csv,
    write_waveform_csv,
)
from .waveforms import (
    SCENARIO_DESCRIPTIONS,
    dip_scenario,
    generate,
    get_scenario,
    scenario_catalog,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FILE = 2


class _UsageError(Exception):
    def __init__(self, usage: str, message: str):
        self.usage = usage
        super().__init__(message)


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors to main() instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(self.format_usage(), message)


def _estimator_list(text: str) -> List[EstimatorId]:
    try:
        return [EstimatorId(name.strip()) for name in text.split(",") if name.strip()]
    except ValueError:
        choices = ", ".join(e.value for e in EstimatorId)
        raise argparse.ArgumentTypeError(f"estimators must be among: {choices}") from None


def _add_estimator_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Estimator INI file.")
    parser.add_argument(
        "--estimators",
        type=_estimator_list,
        help="Comma-separated estimators (affine,frenet,srf_pll,delay_pll).",
    )
    parser.add_argument(
        "--prefilter",
        type=float,
        nargs="?",
        const=PREFILTER_CUTOFF_HZ,
        metavar="HZ",
        help=f"Low-pass the voltages (default cutoff {PREFILTER_CUTOFF_HZ:g} Hz).",
    )
    parser.add_argument(
        "--postfilter",
        type=float,
        nargs="?",
        const=POSTFILTER_CUTOFF_HZ,
        metavar="HZ",
        help=f"Low-pass the frequency traces (default cutoff {POSTFILTER_CUTOFF_HZ:g} Hz).",
    )
    parser.add_argument(
        "--filter-mode",
        choices=[m.value for m in FilterMode],
        default=None,
        help="Filter application mode (default zero_phase).",
    )


def build_argparser() -> argparse.ArgumentParser:
    """Create the CLI argument parser."""
    parser = _ArgumentParser(
        prog="affinefreq",
        description="Instantaneous frequency of three-phase and single-phase voltages.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG."
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    simulate = commands.add_parser("simulate", help="Write a scenario's waveform CSV.")
    simulate.add_argument("scenario", help="Catalog label, 'dip', or scenario INI file.")
    simulate.add_argument("--out", required=True, help="Waveform CSV to write.")
    simulate.add_argument("--truth", help="Ground-truth CSV to write.")
    simulate.add_argument("--snr-db", type=float, help="Add white noise at this SNR.")
    simulate.add_argument("--seed", type=int, help="Noise seed.")
    simulate.add_argument("--duration", type=float, help="Override the duration (s).")

    estimate = commands.add_parser("estimate", help="Estimate the frequency of a CSV.")
    estimate.add_argument("--in", dest="input", required=True, help="Waveform CSV.")
    estimate.add_argument(
        "--schema",
        choices=[s.value for s in WaveformSchema],
        help="Column layout (detected if omitted).",
    )
    estimate.add_argument(
        "--resample", action="store_true", help="Resample non-uniform time stamps."
    )
    estimate.add_argument("--nominal-hz", type=float, help="Nominal frequency (Hz).")
    estimate.add_argument("--out", required=True, help="Trace CSV to write.")
    _add_estimator_options(estimate)

    compare = commands.add_parser("compare", help="Score the estimators on a scenario.")
    compare.add_argument("scenario", help="Catalog label, 'dip', or scenario INI file.")
    compare.add_argument("--settle", type=float, help="Start of the metrics window (s).")
    compare.add_argument("--snr-db", type=float, help="Add white noise at this SNR.")
    compare.add_argument("--seed", type=int, help="Noise seed.")
    compare.add_argument(
        "--out", required=True, help="Report path; writes <out>.txt and <out>.ini."
    )
    _add_estimator_options(compare)

    commands.add_parser("catalog", help="List the built-in scenarios.")
    return parser


def _load_scenario(args: argparse.Namespace) -> ScenarioSpec:
    if Path(args.scenario).is_file():
        spec = read_scenario_file(args.scenario)
    elif args.scenario == "dip":
        spec = dip_scenario()
    else:
        spec = get_scenario(args.scenario)
    changes = {}
    if getattr(args, "snr_db", None) is not None:
        changes["noise_snr_db"] = args.snr_db
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "duration", None) is not None:
        changes["duration"] = args.duration
    return spec.with_overrides(**changes) if changes else spec


def _load_config(args: argparse.Namespace) -> EstimatorConfig:
    cfg = read_estimator_config(args.config) if args.config else EstimatorConfig()
    mode = FilterMode(args.filter_mode) if args.filter_mode else None
    changes = {}
    if args.estimators:
        changes["estimators"] = tuple(args.estimators)
    if args.prefilter is not None:
        changes["prefilter"] = FilterSpec(args.prefilter, mode or FilterMode.ZERO_PHASE)
    if args.postfilter is not None:
        changes["postfilter"] = FilterSpec(args.postfilter, mode or FilterMode.ZERO_PHASE)
    if getattr(args, "nominal_hz", None) is not None:
        changes["nominal_hz"] = args.nominal_hz
    if getattr(args, "settle", None) is not None:
        changes["settle_s"] = args.settle
    return cfg.with_overrides(**changes) if changes else cfg


def _simulate(args: argparse.Namespace) -> int:
    spec = _load_scenario(args)
    buffer, truth = generate(spec)
    write_waveform_csv(args.out, buffer)
    logger.info("Wrote %d samples of %s to %s", buffer.n_samples, spec.label, args.out)
    if args.truth:
        write_trace_csv(args.truth, [], truth)
        logger.info("Wrote ground truth to %s", args.truth)
    return EXIT_OK


def _estimate(args: argparse.Namespace) -> int:
    estimator = FrequencyEstimator(_load_config(args), validate=True)
    buffer = read_waveform_csv(args.input, schema=args.schema, resample=args.resample)
    traces = estimator.estimate(buffer)
    write_trace_csv(args.out, traces.values())
    for name, trace in traces.items():
        logger.info("%s: %.1f%% valid", name, 100.0 * trace.fraction_valid)
    return EXIT_OK


def _compare(args: argparse.Namespace) -> int:
    spec = _load_scenario(args)
    estimator = FrequencyEstimator(_load_config(args), validate=True)
    result = estimator.evaluate(spec)
    txt_path, ini_path = write_report(args.out, result.report)
    sys.stdout.write(format_report(result.report))
    logger.info("Wrote %s and %s", txt_path, ini_path)
    return EXIT_OK


def _catalog(args: argparse.Namespace) -> int:
    for label, spec in scenario_catalog().items():
        phases = "3-phase" if spec.is_three_phase else "1-phase"
        sys.stdout.write(
            f"{label:<13} {phases}  {spec.duration:g} s  {SCENARIO_DESCRIPTIONS[label]}\n"
        )
    return EXIT_OK


_COMMANDS = {
    "simulate": _simulate,
    "estimate": _estimate,
    "compare": _compare,
    "catalog": _catalog,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entrypoint; returns the process exit code."""
    parser = build_argparser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        sys.stderr.write(f"{e.usage}affinefreq: error: {e}\n")
        return EXIT_INVALID
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)

    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return _COMMANDS[args.command](args)
    except (ValidationError, ScenarioNotFoundError, UnsupportedSpecError) as e:
        sys.stderr.write(f"affinefreq: error: {e}\n")
        return EXIT_INVALID
    except (OSError, WaveformFormatError) as e:
        sys.stderr.write(f"affinefreq: error: {e}\n")
        return EXIT_FILE


if __name__ == "__main__":
    sys.exit(main())
