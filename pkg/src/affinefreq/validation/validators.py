"""
affinefreq validation module.

Checks scenario specs, sample buffers, trajectories and estimator settings
before any numerical work is done. The data classes never validate; every
operation that needs a precondition calls one of the ``validate_*`` functions
here and hands the result to :func:`raise_for_errors`.

The checks cover:
    1. Scenario Validation - phase count, sampling, duration, magnitudes
    2. Buffer Validation - time base, channel lengths, required channels
    3. Estimator Validation - stencils, PLL tuning, filter design, settling
    4. Trajectory Validation - presence of the derivatives an estimator needs

Example:
    ```python
    from affinefreq.validation import validate_scenario_spec, raise_for_errors

    issues = validate_scenario_spec(spec)
    for issue in issues:
        print(f"{issue.severity.value}: {issue}")
    raise_for_errors(issues)  # raises ValidationError on any ERROR issue
    ```

Note:
    All validation functions return a list of ValidationIssue objects. Each
    issue carries a message, its location, a severity (ERROR, WARNING, INFO),
    a stable error code and, where one exists, a suggested fix.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..core.config import (
    DerivativeConfig,
    EstimatorConfig,
    FilterSpec,
    PllConfig,
    ScenarioSpec,
)
from ..core.data_classes import PlanarTrajectory, SignalBuffer
from ..core.errors import ValidationError

logger = logging.getLogger(__name__)

# Validation constants
MIN_SAMPLES = 4
MIN_SAMPLES_PER_CYCLE = 20
SUPPORTED_ORDERS = frozenset({1, 2, 3})


class ValidationSeverity(Enum):
    """Validation issue severity levels.

    Attributes:
        ERROR: The operation cannot run; ValidationError is raised
        WARNING: The operation runs but the result is degraded (logged)
        INFO: Advisory only

    Example:
        ```python
        issue = ValidationIssue(
            message="tau is 0; the delay PLL has no quadrature signal",
            severity=ValidationSeverity.WARNING,
        )
        ```
    """

    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"


@dataclass
class ValidationIssue:
    """A validation issue found while checking an input.

    Attributes:
        message (str): Human-readable description of the issue.
        location (Optional[str]): Path to the offending field.
            Example: "scenario.phases[1].magnitude"
        severity (ValidationSeverity): ERROR, WARNING or INFO.
        doc_ref (Optional[str]): Anchor of the documentation section that
            describes the field.
        error_code (Optional[str]): Stable machine-readable code
        suggestion (Optional[str]): Suggested fix

    Example:
        ```python
        issue = ValidationIssue(
            message="duration must be positive, got 0.0",
            location="scenario.duration",
            error_code="DURATION_NOT_POSITIVE",
        )
        print(issue)  # "scenario.duration: duration must be positive, got 0.0"
        ```
    """

    message: str
    location: Optional[str] = None
    severity: ValidationSeverity = ValidationSeverity.ERROR
    doc_ref: Optional[str] = None
    error_code: Optional[str] = None
    suggestion: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert validation issue to structured dictionary format."""
        return {
            "message": self.message,
            "location": self.location,
            "severity": self.severity.value,
            "doc_ref": self.doc_ref,
            "error_code": self.error_code,
            "suggestion": self.suggestion,
        }

    def __str__(self) -> str:
        """Returns "<location>: <message>", or just the message without a location."""
        if self.location:
            return f"{self.location}: {self.message}"
        else:
            return self.message


def _error(message: str, location: str, code: str, **kwargs: Any) -> ValidationIssue:
    return ValidationIssue(
        message=message,
        location=location,
        severity=ValidationSeverity.ERROR,
        error_code=code,
        **kwargs,
    )


def _is_finite(value: Any) -> bool:
    try:
        return math.isfinite(float(value))
    except (TypeError, ValueError):
        return False


def raise_for_errors(issues: List[ValidationIssue]) -> List[ValidationIssue]:
    """Logs non-error issues and raises if any ERROR issue is present.

    Args:
        issues: Issues returned by a validate_* function

    Returns:
        List[ValidationIssue]: The issues, unchanged, when none is an ERROR

    Raises:
        ValidationError: If at least one issue has ERROR severity
    """
    errors = [i for i in issues if i.severity == ValidationSeverity.ERROR]
    for issue in issues:
        if issue.severity == ValidationSeverity.WARNING:
            logger.warning("%s", issue)
        elif issue.severity == ValidationSeverity.INFO:
            logger.info("%s", issue)
    if errors:
        raise ValidationError(errors)
    return issues


def validate_scenario_spec(spec: ScenarioSpec) -> List[ValidationIssue]:
    """Validates a scenario before generation.

    Checks:
    * One or three phases
    * omega_nominal positive and finite
    * At least 20 samples per nominal cycle
    * Positive duration giving at least 4 samples
    * Magnitudes strictly positive on the generation window
    * Harmonic orders of at least 1, below the Nyquist limit (warning)

    Args:
        spec (ScenarioSpec): Scenario to validate

    Returns:
        List[ValidationIssue]: Issues found. Empty list if none.

    Example:
        ```python
        issues = validate_scenario_spec(get_scenario("E6").with_overrides(duration=0.0))
        assert issues[0].error_code == "DURATION_NOT_POSITIVE"
        ```
    """
    issues: List[ValidationIssue] = []

    if len(spec.phases) not in (1, 3):
        issues.append(
            _error(
                f"A scenario needs 1 or 3 phases, got {len(spec.phases)}",
                "scenario.phases",
                "PHASE_COUNT",
                doc_ref="#scenario-files",
            )
        )

    if not _is_finite(spec.omega_nominal) or spec.omega_nominal <= 0:
        issues.append(
            _error(
                f"omega_nominal must be positive, got {spec.omega_nominal}",
                "scenario.omega_nominal",
                "OMEGA_NOT_POSITIVE",
            )
        )
        return issues

    if not _is_finite(spec.duration) or spec.duration <= 0:
        issues.append(
            _error(
                f"duration must be positive, got {spec.duration}",
                "scenario.duration",
                "DURATION_NOT_POSITIVE",
            )
        )

    min_rate = MIN_SAMPLES_PER_CYCLE * spec.nominal_hz
    if not _is_finite(spec.sample_rate) or spec.sample_rate < min_rate:
        issues.append(
            _error(
                f"sample_rate {spec.sample_rate} Hz is below {MIN_SAMPLES_PER_CYCLE} "
                f"samples per nominal cycle",
                "scenario.sample_rate",
                "SAMPLE_RATE_TOO_LOW",
                suggestion=f"Use at least {min_rate:g} Hz",
            )
        )

    if issues:
        return issues

    if spec.n_samples < MIN_SAMPLES:
        issues.append(
            _error(
                f"duration {spec.duration} s gives {spec.n_samples} samples; "
                f"at least {MIN_SAMPLES} are needed",
                "scenario.duration",
                "TOO_FEW_SAMPLES",
            )
        )
        return issues

    t = np.arange(spec.n_samples) / spec.sample_rate
    for i, phase in enumerate(spec.phases):
        location = f"scenario.phases[{i}]"
        if callable(phase.magnitude_fn):
            magnitude = np.asarray(phase.magnitude_fn(t), dtype=float)
            if not np.all(np.isfinite(magnitude)) or np.any(magnitude <= 0):
                issues.append(
                    _error(
                        "magnitude must be strictly positive on the generation window",
                        f"{location}.magnitude",
                        "MAGNITUDE_NOT_POSITIVE",
                    )
                )
        if not _is_finite(phase.displacement):
            issues.append(
                _error(
                    f"displacement must be finite, got {phase.displacement}",
                    f"{location}.displacement",
                    "DISPLACEMENT_NOT_FINITE",
                )
            )
        for j, harmonic in enumerate(phase.harmonics):
            h_location = f"{location}.harmonics[{j}]"
            if harmonic.order < 1:
                issues.append(
                    _error(
                        f"harmonic order must be at least 1, got {harmonic.order}",
                        h_location,
                        "HARMONIC_ORDER",
                    )
                )
            elif harmonic.order * spec.nominal_hz >= spec.sample_rate / 2:
                issues.append(
                    ValidationIssue(
                        message=f"harmonic order {harmonic.order} aliases at "
                        f"{spec.sample_rate:g} Hz",
                        location=h_location,
                        severity=ValidationSeverity.WARNING,
                        error_code="HARMONIC_ALIASED",
                    )
                )

    if spec.noise_snr_db is not None and not _is_finite(spec.noise_snr_db):
        issues.append(
            _error(
                f"noise_snr_db must be finite, got {spec.noise_snr_db}",
                "scenario.noise_snr_db",
                "SNR_NOT_FINITE",
            )
        )

    return issues


def validate_signal_buffer(
    buffer: SignalBuffer,
    required: Optional[Sequence[str]] = None,
    min_samples: int = MIN_SAMPLES,
    location: str = "buffer",
) -> List[ValidationIssue]:
    """Validates the time base and channels of a SignalBuffer.

    Args:
        buffer (SignalBuffer): Buffer to validate
        required (Optional[Sequence[str]]): Channel names that must be present
        min_samples (int): Minimum number of samples per channel
        location (str): Prefix for issue locations

    Returns:
        List[ValidationIssue]: Issues found. Empty list if none.
    """
    issues: List[ValidationIssue] = []

    if not _is_finite(buffer.dt) or buffer.dt <= 0:
        issues.append(
            _error(f"dt must be positive, got {buffer.dt}", f"{location}.dt", "DT_NOT_POSITIVE")
        )

    if not buffer.channels:
        issues.append(_error("buffer has no channels", f"{location}.channels", "NO_CHANNELS"))
        return issues

    for name in required or ():
        if name not in buffer.channels:
            issues.append(
                _error(
                    f"missing channel '{name}' (have: {', '.join(buffer.names)})",
                    f"{location}.channels",
                    "MISSING_CHANNEL",
                )
            )

    lengths = {name: len(x) for name, x in buffer.channels.items()}
    if len(set(lengths.values())) > 1:
        issues.append(
            _error(
                f"channels have different lengths: {lengths}",
                f"{location}.channels",
                "LENGTH_MISMATCH",
            )
        )
    elif buffer.n_samples < min_samples:
        issues.append(
            _error(
                f"{buffer.n_samples} samples; at least {min_samples} are needed",
                f"{location}.channels",
                "TOO_FEW_SAMPLES",
            )
        )

    for name, x in buffer.channels.items():
        if not np.all(np.isfinite(x)):
            issues.append(
                _error(
                    "channel contains non-finite samples",
                    f"{location}.channels.{name}",
                    "NON_FINITE_SAMPLES",
                )
            )

    return issues


def validate_derivative_config(
    cfg: DerivativeConfig, orders: Iterable[int] = (1, 2)
) -> List[ValidationIssue]:
    """Validates stencil settings for the requested derivative orders."""
    issues: List[ValidationIssue] = []
    if cfg.stencil_halfwidth < 1:
        issues.append(
            _error(
                f"stencil_halfwidth must be at least 1, got {cfg.stencil_halfwidth}",
                "derivative.stencil_halfwidth",
                "STENCIL_TOO_NARROW",
            )
        )
        return issues
    for order in orders:
        if order not in SUPPORTED_ORDERS:
            issues.append(
                _error(
                    f"derivative order {order} is not supported (1, 2 or 3)",
                    "derivative.orders",
                    "UNSUPPORTED_ORDER",
                )
            )
        elif cfg.halfwidth_for(order) < order:
            issues.append(
                _error(
                    f"half-width {cfg.halfwidth_for(order)} is too narrow for "
                    f"derivative order {order}",
                    "derivative.stencil_halfwidth",
                    "STENCIL_TOO_NARROW",
                    suggestion=f"Use stencil_halfwidth >= {order - (order - 1) // 2}",
                )
            )
    return issues


def validate_pll_config(
    cfg: PllConfig,
    nominal_hz: float,
    duration: Optional[float] = None,
    single_phase: bool = False,
) -> List[ValidationIssue]:
    """Validates PLL gains and, for the single-phase loop, the transport delay.

    Args:
        cfg (PllConfig): PLL settings
        nominal_hz (float): Nominal frequency used to resolve defaults
        duration (Optional[float]): Buffer duration, to check tau against
        single_phase (bool): Whether the delay loop will run

    Returns:
        List[ValidationIssue]: Issues found. Empty list if none.

    Note:
        tau == 0 is a WARNING: the loop runs but every sample is invalid.
    """
    issues: List[ValidationIssue] = []
    for key in ("kp", "ki"):
        value = getattr(cfg, key)
        if not _is_finite(value) or value <= 0:
            issues.append(
                _error(f"{key} must be finite and positive, got {value}", f"pll.{key}", "PLL_GAIN")
            )
    omega_init = cfg.resolved_omega_init(nominal_hz)
    if not _is_finite(omega_init) or omega_init <= 0:
        issues.append(
            _error(
                f"omega_init must be positive, got {omega_init}",
                "pll.omega_init",
                "PLL_OMEGA_INIT",
            )
        )
    if not single_phase:
        return issues

    tau = cfg.resolved_tau(nominal_hz)
    if not _is_finite(tau) or tau < 0:
        issues.append(
            _error(f"tau must be non-negative, got {tau}", "pll.tau", "PLL_TAU_NEGATIVE")
        )
    elif tau == 0:
        issues.append(
            ValidationIssue(
                message="tau is 0; the delayed signal equals the input and the "
                "loop has no quadrature component",
                location="pll.tau",
                severity=ValidationSeverity.WARNING,
                error_code="PLL_TAU_ZERO",
                suggestion=f"Use a quarter period, {0.25 / nominal_hz:g} s",
            )
        )
    elif duration is not None and tau >= duration:
        issues.append(
            _error(
                f"tau {tau:g} s is not shorter than the buffer ({duration:g} s)",
                "pll.tau",
                "PLL_TAU_TOO_LONG",
            )
        )
    return issues


def validate_filter_design(
    cutoff_hz: float, sample_rate: float, location: str = "filter"
) -> List[ValidationIssue]:
    """Validates a Butterworth cutoff against the sample rate."""
    if not _is_finite(sample_rate) or sample_rate <= 0:
        return [
            _error(
                f"sample_rate must be positive, got {sample_rate}",
                f"{location}.sample_rate",
                "SAMPLE_RATE_NOT_POSITIVE",
            )
        ]
    if not _is_finite(cutoff_hz) or not 0 < cutoff_hz < sample_rate / 2:
        return [
            _error(
                f"cutoff {cutoff_hz} Hz is outside (0, {sample_rate / 2:g}) Hz",
                f"{location}.cutoff_hz",
                "CUTOFF_OUT_OF_RANGE",
            )
        ]
    return []


def _validate_filter_spec(spec: Optional[FilterSpec], location: str) -> List[ValidationIssue]:
    if spec is None:
        return []
    if not _is_finite(spec.cutoff_hz) or spec.cutoff_hz <= 0:
        return [
            _error(
                f"cutoff must be positive, got {spec.cutoff_hz}",
                f"{location}.cutoff_hz",
                "CUTOFF_OUT_OF_RANGE",
            )
        ]
    return []


def validate_estimator_config(cfg: EstimatorConfig) -> List[ValidationIssue]:
    """Validates an EstimatorConfig independently of any input buffer.

    Checks:
    * nominal_hz positive
    * guard finite and non-negative
    * at least one estimator, without duplicates
    * settle_s non-negative
    * stencil, PLL gains and filter cutoffs

    Args:
        cfg (EstimatorConfig): Configuration to validate

    Returns:
        List[ValidationIssue]: Issues found. Empty list if none.
    """
    issues: List[ValidationIssue] = []
    if not _is_finite(cfg.nominal_hz) or cfg.nominal_hz <= 0:
        issues.append(
            _error(
                f"nominal_hz must be positive, got {cfg.nominal_hz}",
                "estimator.nominal_hz",
                "NOMINAL_NOT_POSITIVE",
            )
        )
        return issues
    if not _is_finite(cfg.guard) or cfg.guard < 0:
        issues.append(
            _error(f"guard must be non-negative, got {cfg.guard}", "estimator.guard", "GUARD")
        )
    if not cfg.estimators:
        issues.append(
            _error("no estimators selected", "estimator.estimators", "NO_ESTIMATORS")
        )
    elif len(set(cfg.estimators)) != len(cfg.estimators):
        issues.append(
            _error(
                "estimators are listed more than once",
                "estimator.estimators",
                "DUPLICATE_ESTIMATOR",
            )
        )
    if not _is_finite(cfg.settle_s) or cfg.settle_s < 0:
        issues.append(
            _error(
                f"settle_s must be non-negative, got {cfg.settle_s}",
                "estimator.settle_s",
                "SETTLE_NEGATIVE",
            )
        )
    issues.extend(validate_derivative_config(cfg.derivative, orders=(1, 2, 3)))
    issues.extend(validate_pll_config(cfg.pll, cfg.nominal_hz))
    issues.extend(_validate_filter_spec(cfg.prefilter, "prefilter"))
    issues.extend(_validate_filter_spec(cfg.postfilter, "postfilter"))
    return issues


def validate_trajectory_orders(
    traj: PlanarTrajectory, orders: Iterable[int], location: str = "trajectory"
) -> List[ValidationIssue]:
    """Checks that a trajectory carries the derivative orders an estimator needs."""
    missing = [order for order in orders if not traj.has_orders(order)]
    if not missing:
        return []
    return [
        _error(
            f"missing derivative order(s) {', '.join(str(o) for o in missing)}",
            location,
            "MISSING_DERIVATIVES",
            suggestion="Call differentiate() with the required orders",
        )
    ]


def validate_settle_window(settle_s: float, duration: float) -> List[ValidationIssue]:
    """Validates that the metrics window leaves samples to evaluate."""
    if not _is_finite(settle_s) or settle_s < 0:
        return [
            _error(f"settle_s must be non-negative, got {settle_s}", "metrics.settle_s", "SETTLE_NEGATIVE")
        ]
    if settle_s >= duration:
        return [
            _error(
                f"settle window {settle_s:g} s is not shorter than the trace "
                f"({duration:g} s)",
                "metrics.settle_s",
                "SETTLE_TOO_LONG",
                suggestion="Use a shorter --settle or a longer scenario",
            )
        ]
    return []
