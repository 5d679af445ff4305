"""Synthetic three-phase and single-phase voltages with analytic ground truth.

Every phase is v(t) = V(t) sin(omega_o t + phi(t) +/- zeta), optionally with
harmonic and noise terms. Because V and phi come from the closed function
algebra in affinefreq.core.functions, their derivatives are exact, which gives
both the ground-truth instantaneous frequency 1 + phi'(t)/omega_o and the
exact trajectory derivatives used to separate estimator error from
differentiation error.

Key Components:
    * scenario_catalog / get_scenario - Scenarios E1-E7 and "single-phase"
    * generate / generate_three_phase / generate_single_phase - Sampling
    * analytic_trajectory - Exact v, v', v'' (and v''') in pu
    * dip_scenario - Smooth unbalanced voltage dip with a phase jump

Example:
    ```python
    from affinefreq.waveforms import generate, get_scenario

    buffer, truth = generate(get_scenario("E6"))
    print(buffer.names, truth.if_trace[0])  # ['a', 'b', 'c'] 1.0125...
    ```
"""

import logging
import math
import os
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core.config import (
    DEFAULT_OMEGA_NOMINAL,
    DEFAULT_SAMPLE_RATE,
    PhaseSpec,
    ScenarioSpec,
)
from .core.data_classes import GroundTruth, PlanarTrajectory, SignalBuffer
from .core.errors import ScenarioNotFoundError
from .core.functions import (
    Constant,
    Logistic,
    add,
    derivatives,
    parse_function,
    require_symbolic,
    scale,
)
from .core.enums import Units
from .transforms import CLARKE_MATRIX, per_unit_base
from .validation.validators import (
    ValidationIssue,
    raise_for_errors,
    validate_scenario_spec,
)

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "AFFINE_FREQ_SEED"

# Phase b is displaced by -zeta_b, phases a and c by +zeta
_DISPLACEMENT_SIGN = {"a": 1.0, "b": -1.0, "c": 1.0, "v": 1.0}

_KV = 1000.0
_TWO_THIRDS_PI = 2.0 * math.pi / 3.0

SCENARIO_DESCRIPTIONS: Dict[str, str] = {
    "E1": "balanced, constant magnitude and frequency",
    "E2": "balanced, magnitudes modulated at 0.5 Hz",
    "E3": "constant magnitude unbalance (Vb = 8 kV)",
    "E4": "time-varying magnitude unbalance",
    "E5": "phase-displacement unbalance",
    "E6": "balanced, sinusoidal phase modulation",
    "E7": "phase-modulation unbalance on phase c",
    "single-phase": "single phase, decaying phase modulation",
}


#
# Catalog
#
def _phase(magnitude: str, phase_mod: str = "0", displacement: float = 0.0) -> PhaseSpec:
    return PhaseSpec(
        magnitude_fn=parse_function(magnitude),
        phase_mod_fn=parse_function(phase_mod),
        displacement=displacement,
    )


def _three_phase(
    label: str, phases: Sequence[PhaseSpec], duration: float
) -> ScenarioSpec:
    return ScenarioSpec(
        phases=tuple(phases),
        omega_nominal=DEFAULT_OMEGA_NOMINAL,
        sample_rate=DEFAULT_SAMPLE_RATE,
        duration=duration,
        label=label,
    )


def scenario_catalog() -> Dict[str, ScenarioSpec]:
    """Returns the built-in scenarios keyed by label.

    All scenarios use omega_o = 100 pi rad/s sampled at 10 kHz. E1-E5 last
    2 s; E6, E7 and "single-phase" last 5 s.

    Returns:
        Dict[str, ScenarioSpec]: E1, ..., E7 and "single-phase", in that order
    """
    modulated = "sum(const(12000), sin(3000, pi, 0))"
    phase_swing = "sin(pi, 0.4*pi, 0)"
    z = _TWO_THIRDS_PI
    catalog = {
        "E1": _three_phase(
            "E1", [_phase("12000"), _phase("12000", "0", z), _phase("12000", "0", z)], 2.0
        ),
        "E2": _three_phase(
            "E2",
            [_phase(modulated), _phase(modulated, "0", z), _phase(modulated, "0", z)],
            2.0,
        ),
        "E3": _three_phase(
            "E3", [_phase("12000"), _phase("8000", "0", z), _phase("12000", "0", z)], 2.0
        ),
        "E4": _three_phase(
            "E4",
            [
                _phase(modulated),
                _phase("sum(const(8000), sin(2000, 2*pi, 0))", "0", z),
                _phase(modulated, "0", z),
            ],
            2.0,
        ),
        "E5": _three_phase(
            "E5",
            [_phase("12000"), _phase("12000", "0", -z), _phase("12000", "0", 1.5 * math.pi / 3)],
            2.0,
        ),
        "E6": _three_phase(
            "E6",
            [
                _phase("12000", phase_swing),
                _phase("12000", phase_swing, z),
                _phase("12000", phase_swing, z),
            ],
            5.0,
        ),
        "E7": _three_phase(
            "E7",
            [
                _phase("12000", phase_swing),
                _phase("12000", phase_swing, z),
                _phase("12000", "sin(1.1*pi, 0.4*pi, 0)", z),
            ],
            5.0,
        ),
        "single-phase": ScenarioSpec(
            phases=(
                _phase(
                    "12000",
                    "scale(0.05*100*pi, mul(exp(1, 1), sum(const(1), sin(-1, pi, pi/2))))",
                ),
            ),
            omega_nominal=DEFAULT_OMEGA_NOMINAL,
            sample_rate=DEFAULT_SAMPLE_RATE,
            duration=5.0,
            label="single-phase",
        ),
    }
    return catalog


def get_scenario(label: str) -> ScenarioSpec:
    """Looks up a catalog scenario.

    Raises:
        ScenarioNotFoundError: If the label is not in the catalog
    """
    catalog = scenario_catalog()
    try:
        return catalog[label]
    except KeyError:
        raise ScenarioNotFoundError(label, list(catalog)) from None


def dip_scenario(
    depths: Sequence[float] = (0.4, 0.7, 0.4),
    phase_jump: Union[float, Sequence[float]] = 0.2,
    start: float = 0.3,
    end: float = 0.5,
    edge_width: float = 0.005,
    magnitude: float = 12 * _KV,
    duration: float = 1.0,
    omega_nominal: float = DEFAULT_OMEGA_NOMINAL,
    sample_rate: float = DEFAULT_SAMPLE_RATE,
    label: str = "dip",
) -> ScenarioSpec:
    """Builds an unbalanced voltage dip with a phase-angle jump.

    Each phase sags to ``(1 - depth) * magnitude`` and its phase moves by
    ``phase_jump`` between ``start`` and ``end``; both edges are logistic
    steps of time constant ``edge_width`` so the scenario stays in the
    function algebra and keeps an exact ground truth.

    Args:
        depths: Per-phase sag depth in [0, 1); one value gives a single-phase dip
        phase_jump: Phase-angle jump in radians, shared or per phase
        start, end: Dip edges in seconds
        edge_width: Logistic time constant of both edges in seconds
        magnitude: Pre-fault peak magnitude in volts
        duration: Scenario length in seconds
        omega_nominal: omega_o in rad/s
        sample_rate: Hz
        label: Scenario label

    Returns:
        ScenarioSpec: One or three phases, depending on len(depths)

    Example:
        ```python
        spec = dip_scenario(depths=(0.2, 0.8, 0.2), phase_jump=(-0.1, 0.35, -0.1))
        buffer, truth = generate(spec)
        ```
    """
    depths = tuple(float(d) for d in depths)
    if isinstance(phase_jump, (int, float)):
        jumps = (float(phase_jump),) * len(depths)
    else:
        jumps = tuple(float(j) for j in phase_jump)
    if len(jumps) != len(depths):
        raise ValueError(
            f"phase_jump has {len(jumps)} values for {len(depths)} phases"
        )

    window = add(Logistic(start, edge_width), scale(-1.0, Logistic(end, edge_width)))
    displacements = (0.0, _TWO_THIRDS_PI, _TWO_THIRDS_PI) if len(depths) == 3 else (0.0,)
    phases = tuple(
        PhaseSpec(
            magnitude_fn=add(Constant(magnitude), scale(-depth * magnitude, window)),
            phase_mod_fn=scale(jump, window),
            displacement=zeta,
        )
        for depth, jump, zeta in zip(depths, jumps, displacements)
    )
    return ScenarioSpec(
        phases=phases,
        omega_nominal=omega_nominal,
        sample_rate=sample_rate,
        duration=duration,
        label=label,
    )


#
# Sampling
#
def _angle_derivatives(
    spec: ScenarioSpec, phase: PhaseSpec, sign: float, t: np.ndarray, max_order: int
) -> List[np.ndarray]:
    phi = derivatives(phase.phase_mod_fn, t, max_order)
    angle = [spec.omega_nominal * t + phi[0] + sign * phase.displacement]
    if max_order >= 1:
        angle.append(spec.omega_nominal + phi[1])
    angle.extend(phi[2:])
    return angle


def _sinusoid_derivatives(
    amplitude: Sequence[np.ndarray], angle: Sequence[np.ndarray], max_order: int
) -> List[np.ndarray]:
    """Derivatives of A(t) sin(theta(t)) up to order 3.

    Each derivative is Im(c_k exp(j theta)) with complex envelopes c_k built
    from the derivatives of A and theta.
    """
    zeros = np.zeros_like(angle[0])
    A = list(amplitude) + [zeros] * (4 - len(amplitude))
    th = list(angle) + [zeros] * (4 - len(angle))
    sin_t, cos_t = np.sin(th[0]), np.cos(th[0])

    real = [A[0]]
    imag = [zeros]
    if max_order >= 1:
        real.append(A[1])
        imag.append(A[0] * th[1])
    if max_order >= 2:
        re2 = A[2] - A[0] * th[1] ** 2
        im2 = 2.0 * A[1] * th[1] + A[0] * th[2]
        real.append(re2)
        imag.append(im2)
    if max_order >= 3:
        re2_dot = A[3] - A[1] * th[1] ** 2 - 2.0 * A[0] * th[1] * th[2]
        im2_dot = 2.0 * A[2] * th[1] + 3.0 * A[1] * th[2] + A[0] * th[3]
        real.append(re2_dot - th[1] * im2)
        imag.append(im2_dot + th[1] * re2)
    return [re * sin_t + im * cos_t for re, im in zip(real, imag)]


def _channel_derivatives(
    spec: ScenarioSpec, phase: PhaseSpec, name: str, t: np.ndarray, max_order: int
) -> List[np.ndarray]:
    sign = _DISPLACEMENT_SIGN[name]
    magnitude = derivatives(phase.magnitude_fn, t, max_order)
    angle = _angle_derivatives(spec, phase, sign, t, max_order)
    result = _sinusoid_derivatives(magnitude, angle, max_order)
    for harmonic in phase.harmonics:
        h_amplitude = [harmonic.fraction * m for m in magnitude]
        h_angle = [harmonic.order * a for a in angle]
        h_angle[0] = h_angle[0] + harmonic.phase
        for k, term in enumerate(_sinusoid_derivatives(h_amplitude, h_angle, max_order)):
            result[k] = result[k] + term
    return result


def _resolve_seed(spec: ScenarioSpec) -> int:
    if spec.seed is not None:
        return spec.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env)
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", SEED_ENV_VAR, env)
    return 0


def _add_noise(
    channels: Dict[str, np.ndarray], snr_db: float, seed: int
) -> Dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    noisy = {}
    for name, x in channels.items():
        noise_std = math.sqrt(float(np.mean(x**2)) / 10.0 ** (snr_db / 10.0))
        noisy[name] = x + noise_std * rng.standard_normal(len(x))
    return noisy


def _require_symbolic(spec: ScenarioSpec) -> None:
    for i, phase in enumerate(spec.phases):
        require_symbolic(phase.magnitude_fn, f"scenario.phases[{i}].magnitude")
        require_symbolic(phase.phase_mod_fn, f"scenario.phases[{i}].phase_mod")


def _sample(spec: ScenarioSpec) -> Tuple[SignalBuffer, GroundTruth]:
    _require_symbolic(spec)
    raise_for_errors(validate_scenario_spec(spec))

    t = np.arange(spec.n_samples) / spec.sample_rate
    dt = 1.0 / spec.sample_rate
    channels: Dict[str, np.ndarray] = {}
    per_phase: Dict[str, np.ndarray] = {}
    for name, phase in zip(spec.phase_names, spec.phases):
        channels[name] = _channel_derivatives(spec, phase, name, t, 0)[0]
        per_phase[name] = 1.0 + phase.phase_mod_fn.derivative()(t) / spec.omega_nominal

    if spec.noise_snr_db is not None:
        seed = _resolve_seed(spec)
        channels = _add_noise(channels, spec.noise_snr_db, seed)
        logger.debug("Added noise at %g dB SNR (seed %d)", spec.noise_snr_db, seed)

    logger.debug(
        "Generated scenario %r: %d phase(s), %d samples at %g Hz",
        spec.label,
        len(spec.phases),
        spec.n_samples,
        spec.sample_rate,
    )
    buffer = SignalBuffer(t0=0.0, dt=dt, channels=channels, units=Units.VOLTS)
    truth = GroundTruth(
        t0=0.0, dt=dt, if_trace=per_phase[spec.phase_names[0]], per_phase=per_phase
    )
    return buffer, truth


def _phase_count_issue(expected: int, spec: ScenarioSpec) -> List[ValidationIssue]:
    if len(spec.phases) == expected:
        return []
    return [
        ValidationIssue(
            message=f"expected {expected} phase(s), got {len(spec.phases)}",
            location="scenario.phases",
            error_code="PHASE_COUNT",
        )
    ]


def generate_three_phase(spec: ScenarioSpec) -> Tuple[SignalBuffer, GroundTruth]:
    """Samples a three-phase scenario.

    Args:
        spec (ScenarioSpec): Scenario with phases a, b, c

    Returns:
        Tuple[SignalBuffer, GroundTruth]: Channels a, b, c in volts, and the
            IF of every phase in pu (if_trace is phase a)

    Raises:
        UnsupportedSpecError: If a magnitude or phase function is not symbolic
        ValidationError: If the scenario is invalid or not three-phase
    """
    raise_for_errors(_phase_count_issue(3, spec))
    return _sample(spec)


def generate_single_phase(spec: ScenarioSpec) -> Tuple[SignalBuffer, GroundTruth]:
    """Samples a single-phase scenario into one channel named ``v``.

    Raises:
        UnsupportedSpecError: If a magnitude or phase function is not symbolic
        ValidationError: If the scenario is invalid or not single-phase
    """
    raise_for_errors(_phase_count_issue(1, spec))
    return _sample(spec)


def generate(spec: ScenarioSpec) -> Tuple[SignalBuffer, GroundTruth]:
    """Samples a scenario, dispatching on its phase count."""
    if spec.is_three_phase:
        return generate_three_phase(spec)
    return generate_single_phase(spec)


def analytic_trajectory(
    spec: ScenarioSpec, base: Optional[float] = None
) -> PlanarTrajectory:
    """Exact trajectory of a noise-free scenario, in pu.

    Three-phase scenarios are Clarke-projected, with derivatives up to
    order 3. Single-phase scenarios are embedded as (v, v') with first and
    second derivatives, which needs v up to its third derivative.

    Args:
        spec (ScenarioSpec): Scenario; harmonics are included, noise is not
        base (Optional[float]): Per-unit base; computed like normalize() if None

    Returns:
        PlanarTrajectory: Valid at every sample

    Raises:
        UnsupportedSpecError: If a magnitude or phase function is not symbolic
        ValidationError: If the scenario is invalid
    """
    _require_symbolic(spec)
    raise_for_errors(validate_scenario_spec(spec))

    t = np.arange(spec.n_samples) / spec.sample_rate
    dt = 1.0 / spec.sample_rate
    if spec.is_three_phase:
        per_phase = [
            _channel_derivatives(spec, phase, name, t, 3)
            for name, phase in zip(spec.phase_names, spec.phases)
        ]
        orders = [CLARKE_MATRIX @ np.vstack([p[k] for p in per_phase]) for k in range(4)]
        planar = [(pair[0], pair[1]) for pair in orders]
    else:
        d = _channel_derivatives(spec, spec.phases[0], "v", t, 3)
        planar = [(d[0], d[1]), (d[1], d[2]), (d[2], d[3])]

    if base is None:
        reference = SignalBuffer(
            t0=0.0,
            dt=dt,
            channels={"v1": planar[0][0], "v2": planar[0][1]}
            if spec.is_three_phase
            else {"v": planar[0][0]},
        )
        base = per_unit_base(reference, spec.nominal_hz)

    fields = {}
    for k, (x1, x2) in enumerate(planar[1:], start=1):
        fields[f"d{k}_v1"] = x1 / base
        fields[f"d{k}_v2"] = x2 / base
    return PlanarTrajectory(
        t0=0.0,
        dt=dt,
        v1=planar[0][0] / base,
        v2=planar[0][1] / base,
        omega_nominal=spec.omega_nominal,
        **fields,
    )

