"""File formats: waveform and trace CSVs, scenario and estimator INI files, reports.

Waveform CSVs have a header row and one of two layouts, ``t,va,vb,vc``
(three-phase) or ``t,v`` (single-phase); time is in seconds and must be
strictly increasing and uniformly sampled. Waveforms are written with 17
significant digits so a write/read cycle is lossless; traces and reports use
12.

Scenario and estimator configuration files are INI files read with
configparser; the sections mirror ScenarioSpec.to_dict() and
EstimatorConfig.to_dict(). See docs/source/usage.rst for the schema.

Example:
    ```python
    from affinefreq.io import read_waveform_csv, write_trace_csv

    buffer = read_waveform_csv("fault.csv", resample=True)
    write_trace_csv("fault_if.csv", traces.values())
    ```
"""

import configparser
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .core.config import EstimatorConfig, ScenarioSpec
from .core.data_classes import (
    FrequencyTrace,
    GroundTruth,
    MetricsReport,
    SignalBuffer,
)
from .core.enums import EstimatorId, Units, WaveformSchema
from .core.errors import ParseError, SchemaError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

WAVEFORM_FLOAT_FORMAT = "%.17g"
TRACE_FLOAT_FORMAT = "%.12g"
UNIFORMITY_TOLERANCE = 1e-6
TRUTH_COLUMN = "if_true"
REPAIRED_SUFFIX = "_repaired"

SCHEMA_COLUMNS = {
    WaveformSchema.THREE_PHASE: ("va", "vb", "vc"),
    WaveformSchema.SINGLE_PHASE: ("v",),
}
_COLUMN_TO_CHANNEL = {"va": "a", "vb": "b", "vc": "c", "v": "v"}
_CHANNEL_TO_COLUMN = {"a": "va", "b": "vb", "c": "vc"}


def _write_csv(path: PathLike, frame: pd.DataFrame, float_format: str) -> None:
    try:
        frame.to_csv(path, index=False, float_format=float_format, na_rep="")
    except OSError as e:
        raise OSError(f"Error writing to file {path}: {e}") from e


def _read_csv(path: PathLike) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, comment="#", skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{path}: file is empty") from e
    except pd.errors.ParserError as e:
        raise ParseError(f"{path}: malformed CSV: {e}") from e
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    return frame


def _numeric(frame: pd.DataFrame, columns: Iterable[str]) -> pd.DataFrame:
    return frame[list(columns)].apply(pd.to_numeric, errors="coerce")


def _time_base(t: np.ndarray, path: PathLike) -> Tuple[float, float, float]:
    """Returns (t0, dt, relative deviation of the sampling intervals)."""
    if len(t) < 2:
        raise ParseError(f"{path}: at least 2 samples are needed, got {len(t)}")
    steps = np.diff(t)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        raise ParseError(
            f"{path}: time is not strictly increasing at data row {int(bad[0]) + 2}"
        )
    dt = (t[-1] - t[0]) / (len(t) - 1)
    deviation = float(np.max(np.abs(steps - dt))) / dt
    return float(t[0]), float(dt), deviation


def detect_schema(columns: Iterable[str]) -> Optional[WaveformSchema]:
    """Returns the waveform layout matching a set of column names, if any."""
    names = set(columns)
    if "t" not in names:
        return None
    for schema, required in SCHEMA_COLUMNS.items():
        if names.issuperset(required):
            return schema
    return None


def read_waveform_csv(
    path: PathLike,
    schema: Optional[Union[WaveformSchema, str]] = None,
    resample: bool = False,
) -> SignalBuffer:
    """Reads a measured or simulated waveform.

    Args:
        path: CSV file
        schema: THREE_PHASE (t,va,vb,vc), SINGLE_PHASE (t,v) or None to detect
        resample: Resample non-uniform time onto a uniform grid at the median
            interval instead of rejecting the file

    Returns:
        SignalBuffer: Channels a, b, c or v, in volts

    Raises:
        OSError: If the file cannot be read
        ParseError: If the file is empty, has non-numeric values, or its time
            column is not strictly increasing or (without resample) uniform
            within 1 ppm
        SchemaError: If required columns are missing
    """
    frame = _read_csv(path)
    if schema is None:
        schema = detect_schema(frame.columns)
        if schema is None:
            raise SchemaError(
                f"{path}: expected columns t,va,vb,vc or t,v; found {', '.join(frame.columns)}"
            )
    schema = WaveformSchema(schema)
    columns = ("t",) + SCHEMA_COLUMNS[schema]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)} for {schema.value}")
    if frame.empty:
        raise ParseError(f"{path}: no samples")

    values = _numeric(frame, columns)
    if values.isna().any().any():
        row = int(np.flatnonzero(values.isna().any(axis=1).to_numpy())[0]) + 2
        raise ParseError(f"{path}: missing or non-numeric value at line {row}")

    t = values["t"].to_numpy(dtype=float)
    t0, dt, deviation = _time_base(t, path)
    data = {_COLUMN_TO_CHANNEL[c]: values[c].to_numpy(dtype=float) for c in columns[1:]}

    if deviation > UNIFORMITY_TOLERANCE:
        if not resample:
            raise ParseError(
                f"{path}: sampling is not uniform (intervals deviate by {deviation:.3g} "
                f"of the mean interval, tolerance {UNIFORMITY_TOLERANCE:g}). "
                "Resample the file onto a uniform grid (resample=True, or "
                "--resample on the command line)."
            )
        dt = float(np.median(np.diff(t)))
        n = int(math.floor((t[-1] - t0) / dt + 1e-9)) + 1
        grid = t0 + dt * np.arange(n)
        data = {name: np.interp(grid, t, x) for name, x in data.items()}
        logger.info(
            "Resampled %s onto %d uniform samples (dt = %.6g s, deviation was %.3g)",
            path,
            n,
            dt,
            deviation,
        )

    return SignalBuffer(t0=t0, dt=dt, channels=data, units=Units.VOLTS)


def write_waveform_csv(path: PathLike, buffer: SignalBuffer) -> None:
    """Writes a buffer losslessly (17 significant digits).

    Channels a, b, c are written as va, vb, vc; other names are kept.

    Raises:
        OSError: If there's an error writing to the file
    """
    columns: Dict[str, np.ndarray] = {"t": buffer.time}
    for name in buffer.names:
        columns[_CHANNEL_TO_COLUMN.get(name, name)] = buffer.channel(name)
    _write_csv(path, pd.DataFrame(columns), WAVEFORM_FLOAT_FORMAT)


def write_trace_csv(
    path: PathLike,
    traces: Iterable[FrequencyTrace],
    truth: Optional[GroundTruth] = None,
) -> None:
    """Writes frequency traces (pu), one column per estimator.

    Invalid samples are written as empty fields, except repaired ones: their
    interpolated value is written and a ``<name>_repaired`` column of 0/1
    flags follows the estimator column. With a truth, an ``if_true`` column
    is appended; with no traces the file holds only the truth, which is how
    ``simulate --truth`` writes it.

    Raises:
        OSError: If there's an error writing to the file
        ValueError: If there is nothing to write or lengths differ
    """
    traces = list(traces)
    reference = traces[0] if traces else truth
    if reference is None:
        raise ValueError("write_trace_csv() needs at least one trace or a truth")
    columns: Dict[str, np.ndarray] = {"t": reference.time}
    for trace in traces:
        if trace.n_samples != len(columns["t"]):
            raise ValueError(f"trace {trace.name} has {trace.n_samples} samples, expected {len(columns['t'])}")
        columns[trace.name] = np.where(trace.valid | trace.repaired, trace.omega, np.nan)
        if trace.repaired.any():
            columns[trace.name + REPAIRED_SUFFIX] = trace.repaired.astype(int)
    if truth is not None:
        if truth.n_samples != len(columns["t"]):
            raise ValueError("truth and traces have different lengths")
        columns[TRUTH_COLUMN] = truth.if_trace
    _write_csv(path, pd.DataFrame(columns), TRACE_FLOAT_FORMAT)


def read_trace_csv(path: PathLike) -> Tuple[List[FrequencyTrace], Optional[GroundTruth]]:
    """Reads a file written by write_trace_csv.

    Returns:
        Tuple[List[FrequencyTrace], Optional[GroundTruth]]: Traces in column
            order (empty fields become invalid samples, flagged rows of a
            ``_repaired`` column become invalid repaired samples) and the
            truth, if any

    Raises:
        ParseError: If the file is empty or the time column is malformed
        SchemaError: If the t column is missing or a column is not an estimator
    """
    frame = _read_csv(path)
    if "t" not in frame.columns:
        raise SchemaError(f"{path}: missing column t")
    flags = [c for c in frame.columns if c.endswith(REPAIRED_SUFFIX)]
    names = [c for c in frame.columns if c not in ("t", TRUTH_COLUMN) and c not in flags]
    known = {e.value for e in EstimatorId}
    unknown = [n for n in names if n not in known]
    unknown += [c for c in flags if c[: -len(REPAIRED_SUFFIX)] not in names]
    if unknown:
        raise SchemaError(f"{path}: unknown estimator column(s) {', '.join(unknown)}")
    if frame.empty:
        raise ParseError(f"{path}: no samples")

    values = _numeric(frame, frame.columns)
    if values["t"].isna().any():
        raise ParseError(f"{path}: missing or non-numeric time value")
    t0, dt, _ = _time_base(values["t"].to_numpy(dtype=float), path)

    traces = []
    for name in names:
        column = values[name].to_numpy(dtype=float)
        present = np.isfinite(column)
        repaired = np.zeros(len(column), dtype=bool)
        if name + REPAIRED_SUFFIX in flags:
            repaired = values[name + REPAIRED_SUFFIX].fillna(0).to_numpy(dtype=float) != 0
            repaired &= present
        traces.append(
            FrequencyTrace(
                t0=t0,
                dt=dt,
                omega=np.where(present, column, 0.0),
                valid=present & ~repaired,
                estimator_id=EstimatorId(name),
                repaired=repaired,
            )
        )
    truth = None
    if TRUTH_COLUMN in values.columns:
        truth = GroundTruth(t0=t0, dt=dt, if_trace=values[TRUTH_COLUMN].to_numpy(dtype=float))
    return traces, truth


#
# INI files
#
def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_ini(path: PathLike, sections: Dict[str, Dict[str, Any]]) -> None:
    parser = configparser.ConfigParser(interpolation=None)
    for section, values in sections.items():
        parser[section] = {key: _format_value(v) for key, v in values.items()}
    try:
        with open(path, "w", encoding="utf-8") as f:
            parser.write(f)
    except OSError as e:
        raise OSError(f"Error writing to file {path}: {e}") from e


def _read_ini(path: PathLike) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8-sig") as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise ParseError(f"{path}: {e}") from e
    return {section: dict(parser[section]) for section in parser.sections()}


def read_scenario_file(path: PathLike) -> ScenarioSpec:
    """Reads a scenario INI file ([scenario] plus [phase.a]... or [phase.v]).

    Raises:
        OSError: If the file cannot be read
        ParseError: If the file is not valid INI or a value cannot be parsed
        SchemaError: If the [scenario] or phase sections are missing
    """
    sections = _read_ini(path)
    if "scenario" not in sections:
        raise SchemaError(f"{path}: missing [scenario] section")
    if not any(name.startswith("phase.") for name in sections):
        raise SchemaError(f"{path}: no [phase.<name>] sections")
    try:
        return ScenarioSpec.from_dict(sections)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: {e}") from e


def write_scenario_file(path: PathLike, spec: ScenarioSpec) -> None:
    """Writes a scenario INI file.

    Raises:
        OSError: If there's an error writing to the file
    """
    _write_ini(path, spec.to_dict())


def read_estimator_config(path: PathLike) -> EstimatorConfig:
    """Reads an estimator INI file; absent sections and keys take defaults.

    Raises:
        OSError: If the file cannot be read
        ParseError: If the file is not valid INI or a value cannot be parsed
    """
    sections = _read_ini(path)
    try:
        return EstimatorConfig.from_dict(sections)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: {e}") from e


def write_estimator_config(path: PathLike, cfg: EstimatorConfig) -> None:
    """Writes an estimator INI file.

    Raises:
        OSError: If there's an error writing to the file
    """
    _write_ini(path, cfg.to_dict())


#
# Reports
#
REPORT_COLUMNS = (
    "fraction_valid",
    "rmse_pu",
    "max_abs_error_pu",
    "ripple_pp_pu",
    "settle_time_s",
)


def format_report(report: MetricsReport) -> str:
    """Renders a report as an aligned text table."""
    rows = []
    for name, metrics in report.entries.items():
        row: Dict[str, Any] = {"estimator": name}
        for column in REPORT_COLUMNS:
            value = getattr(metrics, column)
            row[column] = np.nan if value is None else value
        rows.append(row)
    frame = pd.DataFrame(rows, columns=("estimator",) + REPORT_COLUMNS)
    table = frame.to_string(index=False, na_rep="-", float_format=lambda x: f"{x:.6g}")
    header = [
        f"scenario: {report.label or '-'}",
        f"settle_s: {report.settle_s:g}",
        f"truth: {'yes' if report.has_truth else 'no'}",
        "",
    ]
    return "\n".join(header) + table + "\n"


def _report_stem(path: PathLike) -> Path:
    path = Path(path)
    if path.suffix in (".txt", ".ini"):
        return path.with_suffix("")
    return path


def write_report(path: PathLike, report: MetricsReport) -> Tuple[Path, Path]:
    """Writes ``<path>.txt`` (aligned table) and ``<path>.ini`` (key-value).

    The output holds no timestamps, so equal reports give identical bytes.

    Returns:
        Tuple[Path, Path]: The text and INI paths

    Raises:
        OSError: If there's an error writing to either file
    """
    stem = _report_stem(path)
    txt_path = stem.parent / (stem.name + ".txt")
    ini_path = stem.parent / (stem.name + ".ini")
    try:
        txt_path.write_text(format_report(report), encoding="utf-8")
    except OSError as e:
        raise OSError(f"Error writing to file {txt_path}: {e}") from e

    sections: Dict[str, Dict[str, Any]] = {
        "report": {
            "label": report.label,
            "settle_s": report.settle_s,
            "has_truth": report.has_truth,
        }
    }
    for name, metrics in report.entries.items():
        sections[f"estimator.{name}"] = {
            key: TRACE_FLOAT_FORMAT % value for key, value in metrics.to_dict().items()
        }
    _write_ini(ini_path, sections)
    return txt_path, ini_path


def read_report(path: PathLike) -> MetricsReport:
    """Reads the INI half of a report written by write_report.

    Raises:
        ParseError: If the file is not valid INI
        SchemaError: If the [report] section is missing
    """
    stem = _report_stem(path)
    sections = _read_ini(stem.parent / (stem.name + ".ini"))
    if "report" not in sections:
        raise SchemaError(f"{path}: missing [report] section")
    header = sections["report"]
    data = {
        "label": header.get("label", ""),
        "settle_s": header.get("settle_s", 0.2),
        "has_truth": header.get("has_truth", "false").lower() == "true",
        "estimators": {
            name.split(".", 1)[1]: values
            for name, values in sections.items()
            if name.startswith("estimator.")
        },
    }
    return MetricsReport.from_dict(data)
