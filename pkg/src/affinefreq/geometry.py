"""Affine and Euclidean differential invariants of the voltage trajectory.

The affine frequency estimate is

    omega_a = sqrt([v', v''] / [v, v'])

which is invariant under any linear map of the plane and therefore under
magnitude and phase-displacement unbalance. The Frenet estimate
[v, v'] / |v|^2 is exact only for circular trajectories and serves as the
Euclidean baseline.

Brackets are evaluated with the trajectory's orientation s (the sign of the
median of [v, v']), so clockwise curves such as the single-phase (v, v')
embedding are handled like counter-clockwise ones.

Example:
    ```python
    from affinefreq.geometry import omega_affine, omega_frenet

    affine = omega_affine(trajectory)
    frenet = omega_frenet(trajectory)
    print(affine.omega[affine.valid].mean(), frenet.omega[frenet.valid].std())
    ```
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .core.config import DEFAULT_GUARD, ScenarioSpec
from .core.data_classes import (
    AffineInvariants,
    FrequencyTrace,
    PlanarTrajectory,
    ValidityReport,
)
from .core.enums import EstimatorId
from .core.functions import require_symbolic
from .transforms import bracket
from .validation.validators import (
    ValidationIssue,
    raise_for_errors,
    validate_trajectory_orders,
)

logger = logging.getLogger(__name__)

SLOW_VARIATION_THRESHOLD = 0.1


def orientation(traj: PlanarTrajectory) -> int:
    """Returns +1 for a counter-clockwise trajectory, -1 for a clockwise one."""
    raise_for_errors(validate_trajectory_orders(traj, (1,)))
    cross = bracket(traj.position, traj.velocity)[traj.valid]
    if cross.size == 0:
        return 1
    return -1 if np.median(cross) < 0 else 1


def _guarded(values: np.ndarray, mask: np.ndarray, guard: float) -> np.ndarray:
    """Samples of ``mask`` whose value exceeds guard * |median|."""
    if not np.any(mask):
        return mask.copy()
    threshold = guard * abs(float(np.median(values[mask])))
    return mask & (values > threshold)


def _oriented_brackets(
    traj: PlanarTrajectory,
) -> Tuple[int, np.ndarray, Optional[np.ndarray]]:
    s = orientation(traj)
    cross01 = s * bracket(traj.position, traj.velocity)
    cross12 = None
    if traj.has_orders(2):
        cross12 = s * bracket(traj.velocity, traj.acceleration)
    return s, cross01, cross12


def affine_invariants(
    traj: PlanarTrajectory, guard: float = DEFAULT_GUARD
) -> AffineInvariants:
    """Affine arc-length rate and affine curvature of a trajectory.

    sigma_dot = (s [v, v'])^(1/3) and kappa_a = s [v', v''] / sigma_dot^5,
    so that sqrt(kappa_a) * sigma_dot equals the affine frequency.

    Args:
        traj (PlanarTrajectory): Trajectory with first and second derivatives
        guard (float): Relative guard on [v, v']

    Returns:
        AffineInvariants: Zero where invalid

    Raises:
        ValidationError: If first or second derivatives are missing
    """
    raise_for_errors(validate_trajectory_orders(traj, (1, 2)))
    s, cross01, cross12 = _oriented_brackets(traj)
    valid = _guarded(cross01, traj.valid, guard)

    sigma_dot = np.zeros(traj.n_samples)
    kappa_a = np.zeros(traj.n_samples)
    sigma_dot[valid] = np.cbrt(cross01[valid])
    kappa_a[valid] = cross12[valid] / sigma_dot[valid] ** 5
    return AffineInvariants(sigma_dot=sigma_dot, kappa_a=kappa_a, valid=valid, orientation=s)


def _trace(
    traj: PlanarTrajectory, omega: np.ndarray, valid: np.ndarray, estimator_id: EstimatorId
) -> FrequencyTrace:
    omega = np.where(valid, omega, 0.0)
    trace = FrequencyTrace(
        t0=traj.t0, dt=traj.dt, omega=omega, valid=valid, estimator_id=estimator_id
    )
    if traj.n_samples and not np.any(valid):
        logger.warning("%s estimate has no valid samples", estimator_id.value)
    return trace


def omega_affine(traj: PlanarTrajectory, guard: float = DEFAULT_GUARD) -> FrequencyTrace:
    """Affine frequency estimate sqrt([v', v''] / [v, v']) in pu.

    A sample is invalid when either oriented bracket is at or below
    guard times the magnitude of its median, or when the ratio is negative.

    Args:
        traj (PlanarTrajectory): Trajectory with first and second derivatives
        guard (float): Relative bracket guard

    Returns:
        FrequencyTrace: estimator_id AFFINE; invalid samples hold 0.0

    Raises:
        ValidationError: If first or second derivatives are missing
    """
    raise_for_errors(validate_trajectory_orders(traj, (1, 2)))
    _, cross01, cross12 = _oriented_brackets(traj)
    valid = _guarded(cross01, traj.valid, guard)
    valid = _guarded(cross12, valid, guard)

    omega = np.zeros(traj.n_samples)
    omega[valid] = np.sqrt(cross12[valid] / cross01[valid]) / traj.omega_nominal
    return _trace(traj, omega, valid, EstimatorId.AFFINE)


def omega_frenet(traj: PlanarTrajectory, guard: float = DEFAULT_GUARD) -> FrequencyTrace:
    """Frenet-frame (Euclidean) frequency estimate s [v, v'] / |v|^2 in pu.

    Raises:
        ValidationError: If first derivatives are missing
    """
    raise_for_errors(validate_trajectory_orders(traj, (1,)))
    _, cross01, _ = _oriented_brackets(traj)
    radius2 = traj.v1**2 + traj.v2**2
    valid = _guarded(radius2, traj.valid, guard)

    omega = np.zeros(traj.n_samples)
    omega[valid] = cross01[valid] / radius2[valid] / traj.omega_nominal
    valid = valid & (omega > 0)
    return _trace(traj, omega, valid, EstimatorId.FRENET)


def check_slow_variation(spec: ScenarioSpec, h_max: int = 2) -> ValidityReport:
    """Measures how slowly magnitudes and phase modulations vary.

    For every phase and every h in 1..h_max the margins
    max |phi^(h)| / omega_o^h and max |(V / <V>)^(h)| / omega_o^h are computed
    over the generation window, <V> being the mean magnitude. The estimators
    assume all margins are below 0.1.

    Args:
        spec (ScenarioSpec): Scenario to check
        h_max (int): Highest derivative order, 2 or 3

    Returns:
        ValidityReport: Margins keyed "<phase>.<phase_mod|magnitude>.h<h>"

    Raises:
        UnsupportedSpecError: If a function is not symbolic
        ValidationError: If h_max is not 2 or 3

    Example:
        ```python
        report = check_slow_variation(get_scenario("E6"))
        print(report.slow_variation_margins["a.phase_mod.h1"])  # 0.012566...
        ```
    """
    if h_max not in (2, 3):
        raise_for_errors(
            [
                ValidationIssue(
                    message=f"h_max must be 2 or 3, got {h_max}",
                    location="h_max",
                    error_code="H_MAX",
                )
            ]
        )
    t = np.arange(max(spec.n_samples, 1)) / spec.sample_rate
    margins = {}
    for i, (name, phase) in enumerate(zip(spec.phase_names, spec.phases)):
        phi = require_symbolic(phase.phase_mod_fn, f"scenario.phases[{i}].phase_mod")
        magnitude = require_symbolic(phase.magnitude_fn, f"scenario.phases[{i}].magnitude")
        mean_magnitude = abs(float(np.mean(magnitude(t)))) or 1.0
        for h in range(1, h_max + 1):
            scale = spec.omega_nominal**h
            margins[f"{name}.phase_mod.h{h}"] = float(
                np.max(np.abs(phi.derivative(h)(t)))
            ) / scale
            margins[f"{name}.magnitude.h{h}"] = float(
                np.max(np.abs(magnitude.derivative(h)(t)))
            ) / (mean_magnitude * scale)

    report = ValidityReport(
        slow_variation_margins=margins, threshold=SLOW_VARIATION_THRESHOLD
    )
    if not report.satisfied:
        key, value = report.worst_margin
        logger.info("Slow-variation condition violated: %s = %.3g", key, value)
    return report


def assess_validity(
    traj: PlanarTrajectory,
    guard: float = DEFAULT_GUARD,
    spec: Optional[ScenarioSpec] = None,
    h_max: Optional[int] = None,
) -> ValidityReport:
    """Summarizes how usable a trajectory is for the affine estimator.

    Args:
        traj (PlanarTrajectory): Trajectory with first and second derivatives
        guard (float): Relative bracket guard
        spec (Optional[ScenarioSpec]): When given, slow-variation margins are
            included
        h_max (Optional[int]): Derivative order for the margins (default 2)

    Returns:
        ValidityReport: Fraction of interior samples with a valid affine
            estimate and the number of interior samples where an oriented
            bracket is not positive
    """
    raise_for_errors(validate_trajectory_orders(traj, (1, 2)))
    _, cross01, cross12 = _oriented_brackets(traj)
    interior = traj.valid
    violations = int(np.count_nonzero(interior & ((cross01 <= 0) | (cross12 <= 0))))
    if violations:
        logger.warning("%d samples violate the bracket sign condition", violations)

    n_interior = int(np.count_nonzero(interior))
    affine = omega_affine(traj, guard)
    fraction = float(np.count_nonzero(affine.valid)) / n_interior if n_interior else 0.0

    report = ValidityReport(fraction_valid=fraction, bracket_sign_violations=violations)
    if spec is not None:
        margins = check_slow_variation(spec, h_max or 2)
        report.slow_variation_margins = margins.slow_variation_margins
    return report


def repair_invalid(
    trace: FrequencyTrace, max_gap_s: Optional[float] = None, nominal_hz: float = 50.0
) -> FrequencyTrace:
    """Fills short interior runs of invalid samples by linear interpolation.

    Repaired samples stay invalid (metrics ignore them) and are flagged in
    ``repaired``. Runs touching either end of the trace are left alone.

    Args:
        trace (FrequencyTrace): Trace to repair
        max_gap_s (Optional[float]): Longest run to fill; one nominal cycle if None
        nominal_hz (float): Nominal frequency for the default gap

    Returns:
        FrequencyTrace: A new trace
    """
    if max_gap_s is None:
        max_gap_s = 1.0 / nominal_hz
    valid = np.asarray(trace.valid)
    omega = np.array(trace.omega)
    repaired = np.array(trace.repaired)
    index = np.flatnonzero(valid)
    if index.size < 2:
        return trace

    max_gap = int(np.floor(max_gap_s / trace.dt))
    gaps = np.diff(index) - 1
    for start, length in zip(index[:-1], gaps):
        if 0 < length <= max_gap:
            left, right = start, start + length + 1
            fill = slice(left + 1, right)
            omega[fill] = np.interp(
                np.arange(left + 1, right), [left, right], [omega[left], omega[right]]
            )
            repaired[fill] = True

    return FrequencyTrace(
        t0=trace.t0,
        dt=trace.dt,
        omega=omega,
        valid=valid,
        estimator_id=trace.estimator_id,
        repaired=repaired,
    )


def scale_trajectory(traj: PlanarTrajectory, lambda1: float, lambda2: float) -> PlanarTrajectory:
    """Scales the v1 and v2 coordinates (and their derivatives) independently."""

    def _scaled(value: Optional[np.ndarray], factor: float) -> Optional[np.ndarray]:
        return None if value is None else value * factor

    return PlanarTrajectory(
        t0=traj.t0,
        dt=traj.dt,
        v1=traj.v1 * lambda1,
        v2=traj.v2 * lambda2,
        d1_v1=_scaled(traj.d1_v1, lambda1),
        d1_v2=_scaled(traj.d1_v2, lambda2),
        d2_v1=_scaled(traj.d2_v1, lambda1),
        d2_v2=_scaled(traj.d2_v2, lambda2),
        d3_v1=_scaled(traj.d3_v1, lambda1),
        d3_v2=_scaled(traj.d3_v2, lambda2),
        valid=traj.valid,
        omega_nominal=traj.omega_nominal,
    )
