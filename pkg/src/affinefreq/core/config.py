"""Declarative scenario and estimator configuration.

Like the other data classes these hold values without validating them
(see affinefreq.validation.validators). Each class round-trips through
``to_dict`` / ``from_dict``; time functions are carried as text descriptors
so a dict maps one-to-one onto the INI files written by affinefreq.io.

Key Components:
    * HarmonicSpec - Optional additive harmonic term of a phase
    * PhaseSpec - Magnitude, phase modulation and displacement of one phase
    * ScenarioSpec - A complete synthetic voltage
    * DerivativeConfig - Finite-difference stencil settings
    * PllConfig - PI gains, initial frequency and transport delay
    * FilterSpec - Butterworth cutoff and application mode
    * EstimatorConfig - Everything governing an estimation run
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .enums import DerivativeScheme, EstimatorId, FilterMode
from .functions import ZERO, Constant, TimeFunction, parse_function

DEFAULT_SAMPLE_RATE = 10_000.0
DEFAULT_OMEGA_NOMINAL = 100.0 * math.pi
DEFAULT_GUARD = 1e-6
DEFAULT_SETTLE_S = 0.2
PREFILTER_CUTOFF_HZ = 500.0
POSTFILTER_CUTOFF_HZ = 25.0


def _descriptor(fn: Any) -> str:
    if isinstance(fn, TimeFunction):
        return fn.to_descriptor()
    return repr(fn)


def _function(value: Any) -> Any:
    if isinstance(value, str):
        return parse_function(value)
    if isinstance(value, (int, float)):
        return Constant(float(value))
    return value


@dataclass(frozen=True)
class HarmonicSpec:
    """Additive harmonic V(t) * fraction * sin(order * theta(t) + phase)."""

    order: int
    fraction: float
    phase: float = 0.0

    def to_descriptor(self) -> str:
        return f"{self.order}:{self.fraction!r}:{self.phase!r}"

    @classmethod
    def from_descriptor(cls, text: str) -> "HarmonicSpec":
        parts = [p.strip() for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValueError(
                f"Invalid harmonic '{text}'. Expected 'order:fraction' or "
                "'order:fraction:phase'."
            )
        phase = float(parts[2]) if len(parts) == 3 else 0.0
        return cls(order=int(parts[0]), fraction=float(parts[1]), phase=phase)


@dataclass(frozen=True)
class PhaseSpec:
    """One phase v(t) = V(t) sin(omega_o t + phi(t) +/- zeta).

    Attributes:
        magnitude_fn: V(t) in volts
        phase_mod_fn: phi(t) in radians
        displacement: zeta in radians, sign included; phase b subtracts it,
            phases a, c and a single phase add it
        harmonics: Optional additive harmonic terms

    Example:
        ```python
        phase_b = PhaseSpec(
            magnitude_fn=Constant(8000.0),
            phase_mod_fn=ZERO,
            displacement=2 * math.pi / 3,
        )
        ```
    """

    magnitude_fn: TimeFunction
    phase_mod_fn: TimeFunction = ZERO
    displacement: float = 0.0
    harmonics: Tuple[HarmonicSpec, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "magnitude": _descriptor(self.magnitude_fn),
            "phase_mod": _descriptor(self.phase_mod_fn),
            "displacement": self.displacement,
        }
        if self.harmonics:
            result["harmonics"] = ", ".join(h.to_descriptor() for h in self.harmonics)
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PhaseSpec":
        harmonics = data.get("harmonics") or ""
        if isinstance(harmonics, str):
            harmonics = tuple(
                HarmonicSpec.from_descriptor(h) for h in harmonics.split(",") if h.strip()
            )
        return cls(
            magnitude_fn=_function(data.get("magnitude")),
            phase_mod_fn=_function(data.get("phase_mod", 0.0)),
            displacement=float(data.get("displacement", 0.0)),
            harmonics=tuple(harmonics),
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative synthetic voltage with analytic ground truth.

    Attributes:
        phases: One (single-phase) or three (a, b, c) PhaseSpec
        omega_nominal: omega_o in rad/s
        sample_rate: Hz
        duration: Seconds
        label: Catalog label or free text
        noise_snr_db: Additive white noise level; None for a clean signal
        seed: Noise seed; None falls back to AFFINE_FREQ_SEED, then 0

    Note:
        - sample_rate must give at least 20 samples per nominal cycle
        - duration must be positive
        - Checked by validate_scenario_spec
    """

    phases: Tuple[PhaseSpec, ...]
    omega_nominal: float = DEFAULT_OMEGA_NOMINAL
    sample_rate: float = DEFAULT_SAMPLE_RATE
    duration: float = 2.0
    label: str = ""
    noise_snr_db: Optional[float] = None
    seed: Optional[int] = None

    @property
    def nominal_hz(self) -> float:
        return self.omega_nominal / (2.0 * math.pi)

    @property
    def is_three_phase(self) -> bool:
        return len(self.phases) == 3

    @property
    def phase_names(self) -> List[str]:
        return ["a", "b", "c"] if self.is_three_phase else ["v"]

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    def with_overrides(self, **changes: Any) -> "ScenarioSpec":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return ScenarioSpec(**values)

    def to_dict(self) -> Dict[str, Any]:
        scenario: Dict[str, Any] = {
            "label": self.label,
            "omega_nominal": self.omega_nominal,
            "sample_rate": self.sample_rate,
            "duration": self.duration,
        }
        if self.noise_snr_db is not None:
            scenario["noise_snr_db"] = self.noise_snr_db
        if self.seed is not None:
            scenario["seed"] = self.seed
        result: Dict[str, Any] = {"scenario": scenario}
        for name, phase in zip(self.phase_names, self.phases):
            result[f"phase.{name}"] = phase.to_dict()
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioSpec":
        scenario = data.get("scenario", {})
        phase_keys = [k for k in data if k.startswith("phase.")]
        order = {"phase.a": 0, "phase.b": 1, "phase.c": 2}
        phase_keys.sort(key=lambda k: order.get(k, 0))
        noise = scenario.get("noise_snr_db")
        seed = scenario.get("seed")
        return cls(
            phases=tuple(PhaseSpec.from_dict(data[k]) for k in phase_keys),
            omega_nominal=float(scenario.get("omega_nominal", DEFAULT_OMEGA_NOMINAL)),
            sample_rate=float(scenario.get("sample_rate", DEFAULT_SAMPLE_RATE)),
            duration=float(scenario.get("duration", 0.0)),
            label=str(scenario.get("label", "")),
            noise_snr_db=None if noise in (None, "") else float(noise),
            seed=None if seed in (None, "") else int(seed),
        )


@dataclass(frozen=True)
class DerivativeConfig:
    """Central finite-difference settings.

    The stencil for derivative order d uses
    ``stencil_halfwidth + (d - 1) // 2`` samples on each side, so orders 1-2
    use 5 points and order 3 uses 7 points by default, all with accuracy
    order ``2 * stencil_halfwidth``.
    """

    stencil_halfwidth: int = 2
    scheme: DerivativeScheme = DerivativeScheme.CENTRAL

    def halfwidth_for(self, order: int) -> int:
        return self.stencil_halfwidth + (order - 1) // 2

    @property
    def accuracy_order(self) -> int:
        return 2 * self.stencil_halfwidth

    def to_dict(self) -> Dict[str, Any]:
        return {"stencil_halfwidth": self.stencil_halfwidth, "scheme": self.scheme.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DerivativeConfig":
        return cls(
            stencil_halfwidth=int(data.get("stencil_halfwidth", 2)),
            scheme=DerivativeScheme(data.get("scheme", DerivativeScheme.CENTRAL.value)),
        )


@dataclass(frozen=True)
class PllConfig:
    """PLL tuning.

    Attributes:
        kp: Proportional gain, rad/s per pu volt
        ki: Integral gain, rad/s^2 per pu volt
        omega_init: Initial frequency and feed-forward term in rad/s;
            None means omega_o
        tau: Transport delay of the single-phase PLL in seconds; None means
            a quarter of the nominal period
    """

    kp: float = 92.0
    ki: float = 4230.0
    omega_init: Optional[float] = None
    tau: Optional[float] = None

    def resolved_omega_init(self, nominal_hz: float) -> float:
        if self.omega_init is None:
            return 2.0 * math.pi * nominal_hz
        return self.omega_init

    def resolved_tau(self, nominal_hz: float) -> float:
        if self.tau is None:
            return 0.25 / nominal_hz
        return self.tau

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"kp": self.kp, "ki": self.ki}
        if self.omega_init is not None:
            result["omega_init"] = self.omega_init
        if self.tau is not None:
            result["tau"] = self.tau
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PllConfig":
        omega_init = data.get("omega_init")
        tau = data.get("tau")
        return cls(
            kp=float(data.get("kp", 92.0)),
            ki=float(data.get("ki", 4230.0)),
            omega_init=None if omega_init in (None, "") else float(omega_init),
            tau=None if tau in (None, "") else float(tau),
        )


@dataclass(frozen=True)
class FilterSpec:
    """Second-order Butterworth low-pass settings (designed per sample rate)."""

    cutoff_hz: float
    mode: FilterMode = FilterMode.ZERO_PHASE

    def to_dict(self) -> Dict[str, Any]:
        return {"cutoff_hz": self.cutoff_hz, "mode": self.mode.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FilterSpec":
        return cls(
            cutoff_hz=float(data["cutoff_hz"]),
            mode=FilterMode(data.get("mode", FilterMode.ZERO_PHASE.value)),
        )


def _default_estimators() -> Tuple[EstimatorId, ...]:
    return tuple(EstimatorId)


@dataclass(frozen=True)
class EstimatorConfig:
    """Settings of an estimation run.

    Attributes:
        nominal_hz: Nominal grid frequency in Hz
        derivative: Finite-difference settings
        prefilter: Optional voltage low-pass (500 Hz when enabled from the CLI)
        postfilter: Optional frequency-trace low-pass (25 Hz when enabled)
        guard: Relative bracket guard
        estimators: Estimators to run; inapplicable ones are skipped, but at
            least one must apply
        pll: PLL tuning
        settle_s: Start of the metrics window
        repair_invalid: Interpolate short invalid runs for plotting

    Example:
        ```python
        config = EstimatorConfig(
            estimators=(EstimatorId.AFFINE, EstimatorId.FRENET),
            postfilter=FilterSpec(cutoff_hz=25.0),
        )
        ```
    """

    nominal_hz: float = 50.0
    derivative: DerivativeConfig = field(default_factory=DerivativeConfig)
    prefilter: Optional[FilterSpec] = None
    postfilter: Optional[FilterSpec] = None
    guard: float = DEFAULT_GUARD
    estimators: Tuple[EstimatorId, ...] = field(default_factory=_default_estimators)
    pll: PllConfig = field(default_factory=PllConfig)
    settle_s: float = DEFAULT_SETTLE_S
    repair_invalid: bool = False

    @property
    def omega_nominal(self) -> float:
        return 2.0 * math.pi * self.nominal_hz

    def with_overrides(self, **changes: Any) -> "EstimatorConfig":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return EstimatorConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "estimator": {
                "nominal_hz": self.nominal_hz,
                "guard": self.guard,
                "estimators": ", ".join(e.value for e in self.estimators),
                "settle_s": self.settle_s,
                "repair_invalid": self.repair_invalid,
            },
            "derivative": self.derivative.to_dict(),
            "pll": self.pll.to_dict(),
        }
        if self.prefilter is not None:
            result["prefilter"] = self.prefilter.to_dict()
        if self.postfilter is not None:
            result["postfilter"] = self.postfilter.to_dict()
        return result

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EstimatorConfig":
        section = data.get("estimator", {})
        estimators = section.get("estimators")
        if isinstance(estimators, str):
            estimators = [e.strip() for e in estimators.split(",") if e.strip()]
        repair = section.get("repair_invalid", False)
        if isinstance(repair, str):
            repair = repair.strip().lower() in ("1", "true", "yes", "on")
        return cls(
            nominal_hz=float(section.get("nominal_hz", 50.0)),
            derivative=DerivativeConfig.from_dict(data.get("derivative", {})),
            prefilter=FilterSpec.from_dict(data["prefilter"]) if "prefilter" in data else None,
            postfilter=FilterSpec.from_dict(data["postfilter"])
            if "postfilter" in data
            else None,
            guard=float(section.get("guard", DEFAULT_GUARD)),
            estimators=tuple(EstimatorId(e) for e in estimators)
            if estimators is not None
            else _default_estimators(),
            pll=PllConfig.from_dict(data.get("pll", {})),
            settle_s=float(section.get("settle_s", DEFAULT_SETTLE_S)),
            repair_invalid=bool(repair),
        )
