"""affinefreq core data classes.

IMPORTANT: This module only defines data structures and serialization.
All validation is handled separately in affinefreq.validation.validators.
Data classes should NOT perform validation - they hold what they are given so
the validation layer can report every problem at once.

Key Components:
    * SignalBuffer - Uniformly sampled multi-channel waveform
    * GroundTruth - Exact instantaneous frequency of a synthetic waveform
    * PlanarTrajectory - The (v1, v2) curve and its time derivatives
    * AffineInvariants - Affine arc-length rate and affine curvature
    * FrequencyTrace - Per-sample frequency estimate with validity flags
    * ValidityReport - Validity and slow-variation summary of a run
    * BiquadCoeffs - Second-order IIR section
    * EstimatorMetrics / MetricsReport - Accuracy figures per estimator

Example:
    ```python
    import numpy as np
    from affinefreq.core.data_classes import SignalBuffer

    t = np.arange(2000) / 10_000
    buffer = SignalBuffer(t0=0.0, dt=1e-4, channels={"v": np.sin(100 * np.pi * t)})
    print(buffer.n_samples, buffer.sample_rate)
    ```

Note:
    Array-holding classes copy their inputs into read-only float arrays, so
    instances are value-like and safe to hand between threads.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.signal import freqz

from .enums import EstimatorId, Units


def _frozen(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def _frozen_mask(values: Any) -> np.ndarray:
    array = np.array(values, dtype=bool)
    array.setflags(write=False)
    return array


def _time_axis(t0: float, dt: float, n: int) -> np.ndarray:
    return t0 + dt * np.arange(n)


@dataclass(eq=False)
class SignalBuffer:
    """Uniformly sampled multi-channel waveform.

    Attributes:
        t0 (float): Time of the first sample in seconds
        dt (float): Sampling interval in seconds
        channels (Dict[str, np.ndarray]): Ordered channel name to samples
        units (Units): Units of the samples

    Example:
        ```python
        abc = SignalBuffer(t0=0.0, dt=1e-4, channels={"a": va, "b": vb, "c": vc})
        alpha_beta = clarke(abc)
        ```

    Note:
        - All channels should have the same length (at least 4 samples)
        - dt must be positive
        - Both are checked by validate_signal_buffer, not here
    """

    t0: float
    dt: float
    channels: Dict[str, np.ndarray]
    units: Units = Units.VOLTS

    def __post_init__(self) -> None:
        self.channels = {name: _frozen(x) for name, x in self.channels.items()}

    @property
    def names(self) -> List[str]:
        return list(self.channels)

    @property
    def n_samples(self) -> int:
        if not self.channels:
            return 0
        return len(next(iter(self.channels.values())))

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt

    @property
    def duration(self) -> float:
        return self.n_samples * self.dt

    @property
    def time(self) -> np.ndarray:
        return _time_axis(self.t0, self.dt, self.n_samples)

    def channel(self, name: str) -> np.ndarray:
        return self.channels[name]

    def replace_channels(
        self, channels: Dict[str, np.ndarray], units: Optional[Units] = None
    ) -> "SignalBuffer":
        """Returns a buffer on the same time base with new channels."""
        return SignalBuffer(
            t0=self.t0,
            dt=self.dt,
            channels=channels,
            units=self.units if units is None else units,
        )

    def equals(self, other: "SignalBuffer") -> bool:
        """Bit-for-bit comparison of time base, units and samples."""
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and self.units == other.units
            and self.names == other.names
            and all(
                np.array_equal(self.channels[n], other.channels[n]) for n in self.names
            )
        )


@dataclass(eq=False)
class GroundTruth:
    """Exact instantaneous frequency of a synthetic waveform, in pu of omega_o.

    Attributes:
        t0 (float): Time of the first sample in seconds
        dt (float): Sampling interval in seconds
        if_trace (np.ndarray): Reference IF (phase a, or the single phase)
        per_phase (Dict[str, np.ndarray]): IF of every phase

    Note:
        The per-phase traces differ only when the phase modulations differ
        between phases (scenario E7); if_trace is then phase a's IF.
    """

    t0: float
    dt: float
    if_trace: np.ndarray
    per_phase: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.if_trace = _frozen(self.if_trace)
        self.per_phase = {name: _frozen(x) for name, x in self.per_phase.items()}

    @property
    def n_samples(self) -> int:
        return len(self.if_trace)

    @property
    def time(self) -> np.ndarray:
        return _time_axis(self.t0, self.dt, self.n_samples)


@dataclass(eq=False)
class PlanarTrajectory:
    """The planar voltage curve v = (v1, v2) and its time derivatives.

    Attributes:
        t0 (float): Time of the first sample in seconds
        dt (float): Sampling interval in seconds
        v1, v2 (np.ndarray): Curve coordinates (pu)
        d1_v1, d1_v2 (np.ndarray): First derivatives (pu/s)
        d2_v1, d2_v2 (np.ndarray): Second derivatives (pu/s^2)
        d3_v1, d3_v2 (Optional[np.ndarray]): Third derivatives when requested
        valid (np.ndarray): False within the stencil half-width of the edges
        omega_nominal (float): Nominal angular frequency omega_o (rad/s)

    Note:
        Derivatives at invalid samples are 0.0, never extrapolated.
    """

    t0: float
    dt: float
    v1: np.ndarray
    v2: np.ndarray
    d1_v1: Optional[np.ndarray] = None
    d1_v2: Optional[np.ndarray] = None
    d2_v1: Optional[np.ndarray] = None
    d2_v2: Optional[np.ndarray] = None
    d3_v1: Optional[np.ndarray] = None
    d3_v2: Optional[np.ndarray] = None
    valid: Optional[np.ndarray] = None
    omega_nominal: float = 100.0 * np.pi

    _ARRAYS = ("v1", "v2", "d1_v1", "d1_v2", "d2_v1", "d2_v2", "d3_v1", "d3_v2")

    def __post_init__(self) -> None:
        for name in self._ARRAYS:
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, _frozen(value))
        if self.valid is None:
            self.valid = np.ones(len(self.v1), dtype=bool)
        self.valid = _frozen_mask(self.valid)

    @property
    def n_samples(self) -> int:
        return len(self.v1)

    @property
    def time(self) -> np.ndarray:
        return _time_axis(self.t0, self.dt, self.n_samples)

    @property
    def position(self) -> np.ndarray:
        return np.stack([self.v1, self.v2], axis=-1)

    @property
    def velocity(self) -> Optional[np.ndarray]:
        if self.d1_v1 is None or self.d1_v2 is None:
            return None
        return np.stack([self.d1_v1, self.d1_v2], axis=-1)

    @property
    def acceleration(self) -> Optional[np.ndarray]:
        if self.d2_v1 is None or self.d2_v2 is None:
            return None
        return np.stack([self.d2_v1, self.d2_v2], axis=-1)

    @property
    def jerk(self) -> Optional[np.ndarray]:
        if self.d3_v1 is None or self.d3_v2 is None:
            return None
        return np.stack([self.d3_v1, self.d3_v2], axis=-1)

    def has_orders(self, *orders: int) -> bool:
        checks = {1: self.velocity, 2: self.acceleration, 3: self.jerk}
        return all(checks[order] is not None for order in orders)


@dataclass(eq=False)
class AffineInvariants:
    """Affine arc-length rate and affine curvature per sample.

    Attributes:
        sigma_dot (np.ndarray): [v, v']^(1/3), (pu^2/s)^(1/3)
        kappa_a (np.ndarray): [v', v''] / sigma_dot^5
        valid (np.ndarray): False where the defining bracket is at or below
            the guard threshold
        orientation (int): +1 for counter-clockwise curves, -1 for clockwise
    """

    sigma_dot: np.ndarray
    kappa_a: np.ndarray
    valid: np.ndarray
    orientation: int = 1

    def __post_init__(self) -> None:
        self.sigma_dot = _frozen(self.sigma_dot)
        self.kappa_a = _frozen(self.kappa_a)
        self.valid = _frozen_mask(self.valid)


@dataclass(eq=False)
class FrequencyTrace:
    """Per-sample frequency estimate in pu of omega_o.

    Attributes:
        t0 (float): Time of the first sample in seconds
        dt (float): Sampling interval in seconds
        omega (np.ndarray): Estimate in pu; 0.0 where invalid
        valid (np.ndarray): Per-sample validity
        estimator_id (EstimatorId): Which estimator produced the trace
        repaired (np.ndarray): Invalid samples filled by interpolation for
            plotting; they stay invalid for metrics

    Example:
        ```python
        trace = omega_affine(trajectory, guard=1e-6)
        print(trace.fraction_valid, trace.omega[trace.valid].mean())
        ```
    """

    t0: float
    dt: float
    omega: np.ndarray
    valid: np.ndarray
    estimator_id: EstimatorId
    repaired: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.omega = _frozen(self.omega)
        self.valid = _frozen_mask(self.valid)
        if self.repaired is None:
            self.repaired = np.zeros(len(self.omega), dtype=bool)
        self.repaired = _frozen_mask(self.repaired)

    @property
    def n_samples(self) -> int:
        return len(self.omega)

    @property
    def time(self) -> np.ndarray:
        return _time_axis(self.t0, self.dt, self.n_samples)

    @property
    def fraction_valid(self) -> float:
        if self.n_samples == 0:
            return 0.0
        return float(np.count_nonzero(self.valid)) / self.n_samples

    @property
    def name(self) -> str:
        return self.estimator_id.value


@dataclass
class ValidityReport:
    """Validity summary of an estimation run or a scenario.

    Attributes:
        fraction_valid (Optional[float]): Share of valid samples, when a
            trajectory was assessed
        bracket_sign_violations (int): Interior samples where an oriented
            bracket is not positive (typically harmonics)
        slow_variation_margins (Dict[str, float]): max |d^h f/dt^h| / omega_o^h
            keyed "<phase>.<phase_mod|magnitude>.h<h>"
        threshold (float): Margin below which a condition counts as satisfied
    """

    fraction_valid: Optional[float] = None
    bracket_sign_violations: int = 0
    slow_variation_margins: Dict[str, float] = field(default_factory=dict)
    threshold: float = 0.1

    @property
    def satisfied(self) -> bool:
        return all(m < self.threshold for m in self.slow_variation_margins.values())

    @property
    def worst_margin(self) -> Tuple[Optional[str], float]:
        if not self.slow_variation_margins:
            return None, 0.0
        key = max(self.slow_variation_margins, key=self.slow_variation_margins.get)
        return key, self.slow_variation_margins[key]

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "bracket_sign_violations": self.bracket_sign_violations,
            "satisfied": self.satisfied,
            "threshold": self.threshold,
            "slow_variation_margins": dict(self.slow_variation_margins),
        }
        if self.fraction_valid is not None:
            result["fraction_valid"] = self.fraction_valid
        return result


@dataclass(frozen=True)
class BiquadCoeffs:
    """Second-order IIR section y = (b0 + b1 z^-1 + b2 z^-2)/(1 + a1 z^-1 + a2 z^-2).

    Attributes:
        b0, b1, b2 (float): Feed-forward coefficients
        a1, a2 (float): Feedback coefficients (a0 normalized to 1)
        cutoff_hz (float): Design cutoff frequency
        sample_rate (float): Design sample rate
    """

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float
    cutoff_hz: float
    sample_rate: float

    @property
    def b(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2])

    @property
    def a(self) -> np.ndarray:
        return np.array([1.0, self.a1, self.a2])

    def poles(self) -> np.ndarray:
        return np.roots(self.a)

    def dc_gain(self) -> float:
        return (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)

    def response(self, freqs_hz: Any) -> np.ndarray:
        """Complex frequency response H(e^{j 2 pi f / fs})."""
        freqs = np.atleast_1d(np.asarray(freqs_hz, dtype=float))
        _, h = freqz(self.b, self.a, worN=freqs, fs=self.sample_rate)
        return h

    def to_dict(self) -> Dict[str, float]:
        return {
            "b0": self.b0,
            "b1": self.b1,
            "b2": self.b2,
            "a1": self.a1,
            "a2": self.a2,
            "cutoff_hz": self.cutoff_hz,
            "sample_rate": self.sample_rate,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BiquadCoeffs":
        return cls(**{k: float(data[k]) for k in cls.__dataclass_fields__})


@dataclass
class EstimatorMetrics:
    """Accuracy figures of one estimator over the post-settling window.

    Attributes:
        fraction_valid (float): Share of valid samples in the window
        ripple_pp_pu (Optional[float]): Peak-to-peak of the error against the
            truth, or of the deviation from the median without a truth
        rmse_pu (Optional[float]): Root-mean-square error (truth required)
        max_abs_error_pu (Optional[float]): Largest absolute error (truth required)
        settle_time_s (Optional[float]): Time after which the error stays in
            the settling band; None if it never does
    """

    fraction_valid: float
    ripple_pp_pu: Optional[float] = None
    rmse_pu: Optional[float] = None
    max_abs_error_pu: Optional[float] = None
    settle_time_s: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"fraction_valid": self.fraction_valid}
        for key in ("rmse_pu", "max_abs_error_pu", "ripple_pp_pu", "settle_time_s"):
            value = getattr(self, key)
            if value is not None:
                result[key] = value
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EstimatorMetrics":
        def _opt(key: str) -> Optional[float]:
            return float(data[key]) if key in data else None

        return cls(
            fraction_valid=float(data.get("fraction_valid", 0.0)),
            ripple_pp_pu=_opt("ripple_pp_pu"),
            rmse_pu=_opt("rmse_pu"),
            max_abs_error_pu=_opt("max_abs_error_pu"),
            settle_time_s=_opt("settle_time_s"),
        )


@dataclass
class MetricsReport:
    """Metrics of every estimator of a run.

    Attributes:
        entries (Dict[str, EstimatorMetrics]): Estimator name to metrics, in
            run order
        settle_s (float): Start of the evaluation window
        label (str): Scenario or input label
        has_truth (bool): Whether errors were computed against a ground truth
    """

    entries: Dict[str, EstimatorMetrics] = field(default_factory=dict)
    settle_s: float = 0.2
    label: str = ""
    has_truth: bool = False

    def __getitem__(self, name: str) -> EstimatorMetrics:
        return self.entries[name]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "settle_s": self.settle_s,
            "has_truth": self.has_truth,
            "estimators": {name: m.to_dict() for name, m in self.entries.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetricsReport":
        return cls(
            entries={
                name: EstimatorMetrics.from_dict(values)
                for name, values in data.get("estimators", {}).items()
            },
            settle_s=float(data.get("settle_s", 0.2)),
            label=data.get("label", ""),
            has_truth=bool(data.get("has_truth", False)),
        )
