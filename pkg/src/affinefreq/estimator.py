"""
affinefreq: instantaneous frequency of three-phase and single-phase voltages.

The FrequencyEstimator handler owns an EstimatorConfig and runs the full
pipeline on a voltage buffer:

    prefilter -> Clarke (three-phase) or (v, v') embedding (single-phase)
    -> per-unit -> finite differences -> estimators -> edge masking
    -> postfilter -> optional repair of short invalid runs

Module Organization:
    * Evaluation result container
    * FrequencyEstimator handler (config load/save, validation, runs)

Example:
    ```python
    from affinefreq import FrequencyEstimator, get_scenario

    estimator = FrequencyEstimator.from_file("estimator.ini", validate=True)
    result = estimator.evaluate(get_scenario("E3"))
    print(result.report["affine"].ripple_pp_pu, result.report["frenet"].ripple_pp_pu)

    traces = estimator.estimate(read_waveform_csv("fault.csv"))
    ```
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .core.config import EstimatorConfig, ScenarioSpec
from .core.data_classes import (
    FrequencyTrace,
    GroundTruth,
    MetricsReport,
    PlanarTrajectory,
    SignalBuffer,
)
from .core.enums import EstimatorId
from .core.errors import ValidationError
from .filtering import (
    design_butterworth2,
    edge_guard_samples,
    edge_mask,
    filter_buffer,
    filter_trace,
)
from .geometry import omega_affine, omega_frenet, repair_invalid, scale_trajectory
from .io import PathLike, read_estimator_config, write_estimator_config
from .metrics import compute_metrics
from .pll import delay_pll_run, srf_pll_run
from .transforms import clarke, differentiate, normalize, quadrature_embed
from .validation import (
    ValidationIssue,
    ValidationSeverity,
    raise_for_errors,
    validate_estimator_config,
    validate_signal_buffer,
)
from .waveforms import analytic_trajectory, generate

logger = logging.getLogger(__name__)

ValidationIssues = List[ValidationIssue]
Traces = Dict[str, FrequencyTrace]

_THREE_PHASE = ("a", "b", "c")


@dataclass
class Evaluation:
    """Result of running the estimators on a synthetic scenario.

    Attributes:
        spec (ScenarioSpec): The scenario
        buffer (SignalBuffer): Generated voltages
        truth (GroundTruth): Exact instantaneous frequency
        traces (Dict[str, FrequencyTrace]): Estimator name to trace
        report (MetricsReport): Metrics against the truth
    """

    spec: ScenarioSpec
    buffer: SignalBuffer
    truth: GroundTruth
    traces: Traces
    report: MetricsReport


def _mask_trace(trace: FrequencyTrace, mask: np.ndarray) -> FrequencyTrace:
    valid = np.asarray(trace.valid) & mask
    return FrequencyTrace(
        t0=trace.t0,
        dt=trace.dt,
        omega=np.where(valid, trace.omega, 0.0),
        valid=valid,
        estimator_id=trace.estimator_id,
    )


class FrequencyEstimator:
    """Handler running the frequency estimators with one configuration.

    Features:
        - Load and save estimator configuration files
        - Validate the configuration
        - Estimate on measured or generated voltage buffers
        - Evaluate against the analytic truth of a scenario

    Example:
        >>> estimator = FrequencyEstimator(EstimatorConfig(guard=1e-6))
        >>> traces = estimator.estimate(buffer)
        >>> traces["affine"].fraction_valid
        0.9992

    Note:
        Inapplicable estimators (the SRF-PLL on a single phase, the delay
        PLL on three phases) are skipped with an INFO log record.
    """

    #
    # Core interface
    #
    def __init__(self, config: Optional[EstimatorConfig] = None, validate: bool = False):
        """Create a new FrequencyEstimator.

        Args:
            config: Estimator settings; defaults if None
            validate: Whether to validate the configuration now

        Raises:
            ValidationError: If validate=True and the configuration is invalid
        """
        self._config = config or EstimatorConfig()
        if validate:
            self.validate()

    @property
    def config(self) -> EstimatorConfig:
        return self._config

    def validate(self, raise_exception: bool = True) -> Optional[ValidationIssues]:
        """Validates the configuration.

        Args:
            raise_exception: If True, raises ValidationError for ERROR issues.

        Returns:
            Optional[ValidationIssues]: Issues found, None if there are none.

        Raises:
            ValidationError: If an ERROR issue is found and raise_exception is True.
        """
        issues = validate_estimator_config(self._config)
        errors = [i for i in issues if i.severity == ValidationSeverity.ERROR]
        if errors and raise_exception:
            raise ValidationError(errors)
        return issues if issues else None

    #
    # File operations
    #
    @classmethod
    def from_file(cls, filename: PathLike, validate: bool = False) -> "FrequencyEstimator":
        """Creates an estimator from an INI configuration file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ParseError: If the file cannot be parsed
            ValidationError: If validate=True and the configuration is invalid
        """
        try:
            config = read_estimator_config(filename)
        except FileNotFoundError as e:
            raise FileNotFoundError(f"File not found: {filename}") from e
        return cls(config, validate=validate)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], validate: bool = False) -> "FrequencyEstimator":
        """Creates an estimator from a dictionary shaped like to_dict()."""
        return cls(EstimatorConfig.from_dict(data), validate=validate)

    def to_file(self, filename: PathLike) -> None:
        """Saves the configuration as an INI file.

        Raises:
            OSError: If there's an error writing to the file
        """
        write_estimator_config(filename, self._config)

    def to_dict(self) -> Dict[str, Any]:
        return self._config.to_dict()

    #
    # Estimation
    #
    def trajectory(self, buffer: SignalBuffer) -> PlanarTrajectory:
        """Builds the per-unit trajectory the geometric estimators use."""
        return self._prepare(buffer, self._config)[1]

    def estimate(self, buffer: SignalBuffer) -> Traces:
        """Runs the configured estimators on a voltage buffer.

        Args:
            buffer (SignalBuffer): Channels a, b, c (three-phase) or a single
                channel (single-phase), in volts or pu

        Returns:
            Dict[str, FrequencyTrace]: Estimator name to trace, in
                configuration order, skipping inapplicable estimators

        Raises:
            ValidationError: If the configuration or buffer is invalid, or if no
                selected estimator applies to the channel layout
        """
        return self._run(buffer, self._config)

    def estimate_analytic(self, spec: ScenarioSpec) -> Traces:
        """Runs the geometric estimators on the exact trajectory of a scenario.

        Only AFFINE and FRENET are evaluated; filters and PLLs do not apply.
        """
        traj = analytic_trajectory(spec)
        traces: Traces = {}
        for estimator_id in self._config.estimators:
            if estimator_id == EstimatorId.AFFINE:
                traces[estimator_id.value] = omega_affine(traj, self._config.guard)
            elif estimator_id == EstimatorId.FRENET:
                traces[estimator_id.value] = self._frenet(
                    traj, spec.is_three_phase, self._config.guard
                )
        return traces

    def evaluate(self, spec: ScenarioSpec, settle_s: Optional[float] = None) -> Evaluation:
        """Generates a scenario, estimates its frequency and scores the result.

        The nominal frequency is taken from the scenario.

        Args:
            spec (ScenarioSpec): Scenario to run
            settle_s (Optional[float]): Metrics window start; config value if None

        Returns:
            Evaluation: Buffer, truth, traces and metrics
        """
        cfg = self._config.with_overrides(nominal_hz=spec.nominal_hz)
        buffer, truth = generate(spec)
        traces = self._run(buffer, cfg)
        report = compute_metrics(
            traces.values(),
            truth,
            settle_s=cfg.settle_s if settle_s is None else settle_s,
            label=spec.label,
        )
        return Evaluation(spec=spec, buffer=buffer, truth=truth, traces=traces, report=report)

    #
    # Pipeline
    #
    @staticmethod
    def _is_three_phase(buffer: SignalBuffer) -> bool:
        if set(_THREE_PHASE).issubset(buffer.names):
            return True
        if len(buffer.channels) == 1:
            return False
        raise_for_errors(
            [
                ValidationIssue(
                    message="expected channels a, b, c or a single channel, got "
                    + ", ".join(buffer.names),
                    location="buffer.channels",
                    error_code="CHANNEL_LAYOUT",
                )
            ]
        )
        return False

    def _prepare(
        self, buffer: SignalBuffer, cfg: EstimatorConfig
    ) -> Tuple[SignalBuffer, PlanarTrajectory, bool]:
        issues = validate_estimator_config(cfg)
        issues.extend(validate_signal_buffer(buffer))
        raise_for_errors(issues)

        three_phase = self._is_three_phase(buffer)
        if cfg.prefilter is not None:
            buffer = filter_buffer(buffer, cfg.prefilter)
        if three_phase:
            abc = buffer.replace_channels({n: buffer.channel(n) for n in _THREE_PHASE})
            planar, base = normalize(clarke(abc), nominal_hz=cfg.nominal_hz)
            traj = differentiate(planar, (1, 2), cfg.derivative, cfg.nominal_hz)
        else:
            planar, base = normalize(buffer, nominal_hz=cfg.nominal_hz)
            traj = quadrature_embed(planar, cfg.derivative, cfg.nominal_hz)
        logger.debug("Per-unit base %.6g, %d samples", base, buffer.n_samples)
        return planar, traj, three_phase

    def _frenet(self, traj: PlanarTrajectory, three_phase: bool, guard: float) -> FrequencyTrace:
        if not three_phase:
            # The (v, v') embedding is a circle only once v' is divided by omega_o
            traj = scale_trajectory(traj, 1.0, 1.0 / traj.omega_nominal)
        return omega_frenet(traj, guard)

    def _run(self, buffer: SignalBuffer, cfg: EstimatorConfig) -> Traces:
        planar, traj, three_phase = self._prepare(buffer, cfg)
        traces: Traces = {}
        for estimator_id in cfg.estimators:
            if estimator_id == EstimatorId.AFFINE:
                trace = omega_affine(traj, cfg.guard)
            elif estimator_id == EstimatorId.FRENET:
                trace = self._frenet(traj, three_phase, cfg.guard)
            elif estimator_id == EstimatorId.SRF_PLL and three_phase:
                trace = srf_pll_run(planar, cfg.pll, cfg.nominal_hz)
            elif estimator_id == EstimatorId.DELAY_PLL and not three_phase:
                trace = delay_pll_run(planar, cfg.pll, cfg.nominal_hz)
            else:
                logger.info(
                    "Skipping %s: not applicable to %s input",
                    estimator_id.value,
                    "three-phase" if three_phase else "single-phase",
                )
                continue
            traces[estimator_id.value] = self._finish(trace, buffer, cfg)
        if not traces:
            names = ", ".join(e.value for e in cfg.estimators)
            raise_for_errors(
                [
                    ValidationIssue(
                        message=f"none of the estimators ({names}) applies to "
                        + ("three-phase" if three_phase else "single-phase")
                        + " input",
                        location="estimator.estimators",
                        error_code="NO_APPLICABLE_ESTIMATOR",
                        suggestion="Use srf_pll for three-phase and delay_pll for single-phase input",
                    )
                ]
            )
        return traces

    def _finish(
        self, trace: FrequencyTrace, buffer: SignalBuffer, cfg: EstimatorConfig
    ) -> FrequencyTrace:
        if cfg.prefilter is not None:
            coeffs = design_butterworth2(cfg.prefilter.cutoff_hz, buffer.sample_rate)
            mask = edge_mask(trace.n_samples, edge_guard_samples(coeffs), cfg.prefilter.mode)
            trace = _mask_trace(trace, mask)
        if cfg.postfilter is not None:
            coeffs = design_butterworth2(cfg.postfilter.cutoff_hz, buffer.sample_rate)
            trace = filter_trace(trace, coeffs, cfg.postfilter.mode)
        if cfg.repair_invalid:
            trace = repair_invalid(trace, nominal_hz=cfg.nominal_hz)
        if trace.n_samples and trace.fraction_valid == 0.0:
            logger.warning("%s produced no valid samples", trace.name)
        return trace
