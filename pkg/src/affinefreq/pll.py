"""Phase-locked-loop baselines.

Both loops share :func:`pll_step`: the (alpha, beta) sample is rotated by
-theta_hat, the quadrature component v_q = -v_alpha sin(theta_hat) +
v_beta cos(theta_hat) is driven to zero by a PI controller, and the angle is
advanced by forward Euler. The synchronous-reference-frame PLL takes its
(alpha, beta) pair from the Clarke transform; the single-phase loop builds it
from the signal and a copy delayed by a quarter period.

Inputs are expressed in pu before the loop runs so the default gains
(kp = 92, ki = 4230) apply to any voltage level.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core.config import PllConfig
from .core.data_classes import FrequencyTrace, SignalBuffer
from .core.enums import EstimatorId, Units
from .transforms import normalize
from .validation.validators import (
    ValidationIssue,
    raise_for_errors,
    validate_pll_config,
    validate_signal_buffer,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass
class PllState:
    """Loop state after a step.

    Attributes:
        theta_hat (float): Estimated angle in [0, 2 pi)
        omega_hat (float): Estimated angular frequency in rad/s
        integrator (float): PI integrator, rad/s
    """

    theta_hat: float
    omega_hat: float
    integrator: float = 0.0


def pll_step(
    state: PllState,
    v_alpha: float,
    v_beta: float,
    dt: float,
    cfg: PllConfig,
    nominal_hz: float = 50.0,
) -> PllState:
    """Advances the loop by one sample.

    Args:
        state (PllState): State before the sample
        v_alpha, v_beta (float): Stationary-frame input in pu
        dt (float): Sampling interval in seconds
        cfg (PllConfig): Gains and initial frequency
        nominal_hz (float): Resolves cfg.omega_init when it is None

    Returns:
        PllState: New state; omega_hat is the estimate for this sample
    """
    v_q = -v_alpha * math.sin(state.theta_hat) + v_beta * math.cos(state.theta_hat)
    omega_hat = cfg.resolved_omega_init(nominal_hz) + cfg.kp * v_q + state.integrator
    integrator = state.integrator + cfg.ki * v_q * dt
    theta_hat = (state.theta_hat + omega_hat * dt) % TWO_PI
    return PllState(theta_hat=theta_hat, omega_hat=omega_hat, integrator=integrator)


def _run_loop(
    alpha: np.ndarray,
    beta: np.ndarray,
    start: int,
    dt: float,
    cfg: PllConfig,
    nominal_hz: float,
) -> np.ndarray:
    omega = np.zeros(len(alpha))
    if start >= len(alpha):
        return omega
    state = PllState(
        theta_hat=math.atan2(float(beta[start]), float(alpha[start])) % TWO_PI,
        omega_hat=cfg.resolved_omega_init(nominal_hz),
    )
    for k in range(start, len(alpha)):
        state = pll_step(state, float(alpha[k]), float(beta[k]), dt, cfg, nominal_hz)
        omega[k] = state.omega_hat
    return omega / (TWO_PI * nominal_hz)


def _per_unit(buffer: SignalBuffer, nominal_hz: float) -> SignalBuffer:
    if buffer.units == Units.PU:
        return buffer
    return normalize(buffer, nominal_hz=nominal_hz)[0]


def srf_pll_run(
    alpha_beta: SignalBuffer, cfg: Optional[PllConfig] = None, nominal_hz: float = 50.0
) -> FrequencyTrace:
    """Synchronous-reference-frame PLL on an (alpha, beta) buffer.

    Args:
        alpha_beta (SignalBuffer): Channels "alpha" and "beta" (volts or pu)
        cfg (Optional[PllConfig]): Loop tuning; defaults apply if None
        nominal_hz (float): Nominal frequency

    Returns:
        FrequencyTrace: estimator_id SRF_PLL, valid at every sample

    Raises:
        ValidationError: If a channel is missing or the tuning is invalid

    Example:
        ```python
        trace = srf_pll_run(clarke(abc), PllConfig(kp=92.0, ki=4230.0))
        ```
    """
    cfg = cfg or PllConfig()
    issues = validate_signal_buffer(alpha_beta, required=("alpha", "beta"))
    issues.extend(validate_pll_config(cfg, nominal_hz))
    raise_for_errors(issues)

    pu = _per_unit(alpha_beta, nominal_hz)
    omega = _run_loop(pu.channel("alpha"), pu.channel("beta"), 0, pu.dt, cfg, nominal_hz)
    return FrequencyTrace(
        t0=pu.t0,
        dt=pu.dt,
        omega=omega,
        valid=np.ones(pu.n_samples, dtype=bool),
        estimator_id=EstimatorId.SRF_PLL,
    )


def delay_pll_run(
    v: SignalBuffer, cfg: Optional[PllConfig] = None, nominal_hz: float = 50.0
) -> FrequencyTrace:
    """Transport-delay PLL on a single-phase buffer.

    The quadrature signal is the input delayed by tau, rounded to the nearest
    sample: alpha = v(t), beta = v(t - tau). Samples before the delay line is
    full are invalid. With tau = 0 there is no quadrature signal; the issue is
    logged as a warning and every sample is returned invalid.

    Args:
        v (SignalBuffer): Exactly one channel (volts or pu)
        cfg (Optional[PllConfig]): Loop tuning; tau None means a quarter period
        nominal_hz (float): Nominal frequency

    Returns:
        FrequencyTrace: estimator_id DELAY_PLL

    Raises:
        ValidationError: If the buffer is invalid, the tuning is invalid or
            tau is not shorter than the buffer
    """
    cfg = cfg or PllConfig()
    issues = validate_signal_buffer(v)
    if len(v.channels) != 1:
        issues.append(
            ValidationIssue(
                message=f"the delay PLL needs 1 channel, got {len(v.channels)}",
                location="buffer.channels",
                error_code="CHANNEL_COUNT",
            )
        )
    issues.extend(
        validate_pll_config(cfg, nominal_hz, duration=v.duration, single_phase=True)
    )
    raise_for_errors(issues)

    n = v.n_samples
    delay = int(round(cfg.resolved_tau(nominal_hz) / v.dt))
    if delay == 0:
        if cfg.resolved_tau(nominal_hz) > 0:
            logger.warning("tau is shorter than half a sample; the delay rounds to 0")
        return FrequencyTrace(
            t0=v.t0,
            dt=v.dt,
            omega=np.zeros(n),
            valid=np.zeros(n, dtype=bool),
            estimator_id=EstimatorId.DELAY_PLL,
        )

    x = _per_unit(v, nominal_hz).channel(v.names[0])
    beta = np.zeros(n)
    beta[delay:] = x[: n - delay]
    omega = _run_loop(x, beta, delay, v.dt, cfg, nominal_hz)
    valid = np.zeros(n, dtype=bool)
    valid[delay:] = True
    logger.debug("Delay PLL: %d-sample delay, %d valid samples", delay, n - delay)
    return FrequencyTrace(
        t0=v.t0,
        dt=v.dt,
        omega=omega,
        valid=valid,
        estimator_id=EstimatorId.DELAY_PLL,
    )
