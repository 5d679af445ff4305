"""Accuracy metrics of frequency traces.

Metrics are computed over valid samples from ``settle_s`` onward, which
leaves out the PLL pull-in and the filter start-up transients:

* ripple_pp_pu - peak-to-peak of the error against the truth, or of the
  deviation from the median when there is no truth
* rmse_pu, max_abs_error_pu - against the truth only
* settle_time_s - earliest time after which every valid sample stays within
  the settling band of the truth
"""

import logging
from typing import Iterable, Optional

import numpy as np

from .core.data_classes import EstimatorMetrics, FrequencyTrace, GroundTruth, MetricsReport
from .validation.validators import (
    ValidationIssue,
    raise_for_errors,
    validate_settle_window,
)

logger = logging.getLogger(__name__)

DEFAULT_SETTLE_BAND_PU = 5e-3


def _settle_time(
    trace: FrequencyTrace, error: np.ndarray, band: float
) -> Optional[float]:
    valid = np.asarray(trace.valid)
    valid_index = np.flatnonzero(valid)
    if valid_index.size == 0:
        return None
    outside = np.flatnonzero(valid & (np.abs(error) > band))
    if outside.size == 0:
        return float(trace.time[valid_index[0]])
    later = valid_index[valid_index > outside[-1]]
    if later.size == 0:
        return None
    return float(trace.time[later[0]])


def trace_metrics(
    trace: FrequencyTrace,
    truth: Optional[GroundTruth] = None,
    settle_s: float = 0.2,
    settle_band_pu: float = DEFAULT_SETTLE_BAND_PU,
) -> EstimatorMetrics:
    """Metrics of a single trace; see compute_metrics."""
    window = trace.time >= trace.t0 + settle_s - 0.5 * trace.dt
    selected = window & np.asarray(trace.valid)
    n_window = int(np.count_nonzero(window))
    fraction = float(np.count_nonzero(selected)) / n_window if n_window else 0.0
    if not np.any(selected):
        logger.warning("%s has no valid samples after %g s", trace.name, settle_s)
        return EstimatorMetrics(fraction_valid=fraction)

    omega = np.asarray(trace.omega)
    if truth is None:
        deviation = omega[selected] - np.median(omega[selected])
        return EstimatorMetrics(
            fraction_valid=fraction, ripple_pp_pu=float(np.ptp(deviation))
        )

    error = omega - np.asarray(truth.if_trace)
    windowed = error[selected]
    return EstimatorMetrics(
        fraction_valid=fraction,
        ripple_pp_pu=float(np.ptp(windowed)),
        rmse_pu=float(np.sqrt(np.mean(windowed**2))),
        max_abs_error_pu=float(np.max(np.abs(windowed))),
        settle_time_s=_settle_time(trace, error, settle_band_pu),
    )


def compute_metrics(
    traces: Iterable[FrequencyTrace],
    truth: Optional[GroundTruth] = None,
    settle_s: float = 0.2,
    settle_band_pu: float = DEFAULT_SETTLE_BAND_PU,
    label: str = "",
) -> MetricsReport:
    """Computes accuracy metrics for every trace of a run.

    Args:
        traces: Traces on a common time base
        truth: Ground truth; without it only fraction_valid and ripple are set
        settle_s: Start of the evaluation window, seconds after the first sample
        settle_band_pu: Error band that defines settle_time_s
        label: Stored on the report

    Returns:
        MetricsReport: One entry per trace, in order

    Raises:
        ValidationError: If the window leaves no samples, or the traces and
            truth have different lengths

    Example:
        ```python
        report = compute_metrics(traces.values(), truth, settle_s=0.2)
        print(report["affine"].rmse_pu)
        ```
    """
    traces = list(traces)
    report = MetricsReport(settle_s=settle_s, label=label, has_truth=truth is not None)
    if not traces:
        return report

    reference = traces[0]
    issues = validate_settle_window(settle_s, reference.n_samples * reference.dt)
    for trace in traces:
        n_expected = truth.n_samples if truth is not None else reference.n_samples
        if trace.n_samples != n_expected:
            issues.append(
                ValidationIssue(
                    message=f"{trace.n_samples} samples, expected {n_expected}",
                    location=f"traces.{trace.name}",
                    error_code="LENGTH_MISMATCH",
                )
            )
    raise_for_errors(issues)

    for trace in traces:
        report.entries[trace.name] = trace_metrics(trace, truth, settle_s, settle_band_pu)
    return report
