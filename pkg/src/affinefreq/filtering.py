"""Second-order Butterworth low-pass filtering of voltages and frequency traces.

Two optional filters sit around the estimators: a prefilter (500 Hz by
default) on the sampled voltages to tame noise before differentiation, and a
postfilter (25 Hz) on the frequency traces to remove the residual 2 omega_o
ripple. Both are off unless configured.

Filters are applied either causally (one forward pass, as a streaming device
would) or with zero phase (forward and backward pass, for offline analysis).
Each pass starts from the steady state for the first sample, which removes the
step transient but not the start-up transient of an oscillating input;
:func:`edge_guard_samples` gives the span to exclude.
"""

import logging
import math

import numpy as np
from scipy.signal import butter, filtfilt, lfilter, lfilter_zi

from .core.config import FilterSpec
from .core.data_classes import BiquadCoeffs, FrequencyTrace, SignalBuffer
from .core.enums import FilterMode
from .validation.validators import raise_for_errors, validate_filter_design

logger = logging.getLogger(__name__)

EDGE_GUARD_CYCLES = 6.0


def design_butterworth2(cutoff_hz: float, sample_rate: float) -> BiquadCoeffs:
    """Designs a second-order Butterworth low-pass (bilinear, pre-warped).

    Args:
        cutoff_hz (float): -3 dB frequency, in (0, sample_rate / 2)
        sample_rate (float): Hz

    Returns:
        BiquadCoeffs: Normalized so that a0 = 1

    Raises:
        ValidationError: If the cutoff is outside (0, sample_rate / 2)

    Example:
        ```python
        coeffs = design_butterworth2(100.0, 10_000.0)
        abs(coeffs.response([1000.0])[0])  # ~0.0094
        ```
    """
    raise_for_errors(validate_filter_design(cutoff_hz, sample_rate))
    b, a = butter(2, cutoff_hz, btype="low", fs=sample_rate)
    return BiquadCoeffs(
        b0=float(b[0]),
        b1=float(b[1]),
        b2=float(b[2]),
        a1=float(a[1] / a[0]),
        a2=float(a[2] / a[0]),
        cutoff_hz=float(cutoff_hz),
        sample_rate=float(sample_rate),
    )


def filter_apply(
    coeffs: BiquadCoeffs, x: np.ndarray, mode: FilterMode = FilterMode.ZERO_PHASE
) -> np.ndarray:
    """Filters a sequence.

    Args:
        coeffs (BiquadCoeffs): Filter
        x (np.ndarray): Input samples
        mode (FilterMode): CAUSAL (lfilter, transposed direct form II) or
            ZERO_PHASE (filtfilt without padding)

    Returns:
        np.ndarray: Output of the same length; a constant input passes unchanged
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    b, a = coeffs.b, coeffs.a
    if mode == FilterMode.ZERO_PHASE:
        return filtfilt(b, a, x, padlen=0)
    zi = lfilter_zi(b, a) * x[0]
    y, _ = lfilter(b, a, x, zi=zi)
    return y


def edge_guard_samples(coeffs: BiquadCoeffs) -> int:
    """Samples of start-up transient to exclude: six cutoff periods."""
    return int(math.ceil(EDGE_GUARD_CYCLES * coeffs.sample_rate / coeffs.cutoff_hz))


def filter_buffer(buffer: SignalBuffer, spec: FilterSpec) -> SignalBuffer:
    """Filters every channel of a buffer with a Butterworth designed for its rate."""
    coeffs = design_butterworth2(spec.cutoff_hz, buffer.sample_rate)
    filtered = {name: filter_apply(coeffs, x, spec.mode) for name, x in buffer.channels.items()}
    logger.debug("Filtered %d channel(s) at %g Hz (%s)", len(filtered), spec.cutoff_hz, spec.mode.value)
    return buffer.replace_channels(filtered)


def edge_mask(n: int, guard: int, mode: FilterMode) -> np.ndarray:
    """True for samples outside the start-up transient(s) of a filter."""
    mask = np.ones(n, dtype=bool)
    mask[: min(guard, n)] = False
    if mode == FilterMode.ZERO_PHASE and guard > 0:
        mask[max(n - guard, 0) :] = False
    return mask


def filter_trace(
    trace: FrequencyTrace, coeffs: BiquadCoeffs, mode: FilterMode = FilterMode.ZERO_PHASE
) -> FrequencyTrace:
    """Low-pass filters a frequency trace.

    Invalid samples are bridged by linear interpolation before filtering so
    they do not pull the output toward zero; they stay invalid afterwards.
    Samples within the filter's edge guard are also flagged invalid (both
    ends for zero-phase, the start for causal filtering).

    Args:
        trace (FrequencyTrace): Trace to filter
        coeffs (BiquadCoeffs): Filter designed for the trace's sample rate
        mode (FilterMode): Application mode

    Returns:
        FrequencyTrace: A new trace with the same estimator_id
    """
    valid = np.asarray(trace.valid)
    index = np.flatnonzero(valid)
    if index.size == 0:
        return trace

    samples = np.arange(trace.n_samples)
    bridged = np.interp(samples, index, np.asarray(trace.omega)[index])
    filtered = filter_apply(coeffs, bridged, mode)

    valid = valid & edge_mask(trace.n_samples, edge_guard_samples(coeffs), mode)
    keep = valid | np.asarray(trace.repaired)
    if not np.any(valid):
        logger.warning("%s trace is shorter than the postfilter edge guard", trace.name)
    return FrequencyTrace(
        t0=trace.t0,
        dt=trace.dt,
        omega=np.where(keep, filtered, 0.0),
        valid=valid,
        estimator_id=trace.estimator_id,
        repaired=np.asarray(trace.repaired) & ~valid,
    )
