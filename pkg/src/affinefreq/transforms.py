"""Clarke projection, planar brackets and finite-difference derivatives.

Turns sampled voltages into a PlanarTrajectory: three-phase input is projected
onto the (alpha, beta) plane with the power-invariant (orthonormal) Clarke matrix,
single-phase input is embedded in the plane as (v, v'). Derivatives come from
central finite-difference stencils whose weights solve a Vandermonde system.

Example:
    ```python
    from affinefreq.transforms import clarke, normalize, differentiate

    alpha_beta = clarke(abc)
    alpha_beta_pu, base = normalize(alpha_beta, nominal_hz=50.0)
    trajectory = differentiate(alpha_beta_pu, orders=(1, 2))
    ```
"""

import logging
import math
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .core.config import DerivativeConfig
from .core.data_classes import PlanarTrajectory, SignalBuffer
from .core.enums import Units
from .validation.validators import (
    ValidationIssue,
    raise_for_errors,
    validate_derivative_config,
    validate_signal_buffer,
)

logger = logging.getLogger(__name__)

CLARKE_MATRIX = math.sqrt(2.0 / 3.0) * np.array(
    [
        [1.0, -0.5, -0.5],
        [0.0, math.sqrt(3.0) / 2.0, -math.sqrt(3.0) / 2.0],
    ]
)

# Relative floor under which a per-unit base counts as zero
_BASE_FLOOR = 1e-300


def clarke(abc: SignalBuffer) -> SignalBuffer:
    """Projects phases a, b, c onto the (alpha, beta) plane.

    Args:
        abc (SignalBuffer): Buffer with channels "a", "b" and "c"

    Returns:
        SignalBuffer: Channels "alpha" and "beta" on the same time base

    Raises:
        ValidationError: If a phase channel is missing or the buffer is invalid
    """
    raise_for_errors(validate_signal_buffer(abc, required=("a", "b", "c")))
    stacked = np.vstack([abc.channel("a"), abc.channel("b"), abc.channel("c")])
    alpha, beta = CLARKE_MATRIX @ stacked
    return abc.replace_channels({"alpha": alpha, "beta": beta})


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Planar bracket [a, b] = a1*b2 - b1*a2 over the last axis.

    Args:
        a, b: Arrays of shape (..., 2)

    Returns:
        np.ndarray: Array of shape (...)
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - b[..., 0] * a[..., 1]


@lru_cache(maxsize=32)
def _weights(order: int, halfwidth: int) -> Tuple[float, ...]:
    offsets = np.arange(-halfwidth, halfwidth + 1, dtype=float)
    # Row i enforces sum_j w_j k_j^i = i! * delta(i, order)
    system = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return tuple(np.linalg.solve(system, rhs))


def stencil_weights(order: int, halfwidth: int) -> np.ndarray:
    """Central finite-difference weights for the ``order``-th derivative.

    The weights w satisfy f^(order)(t) ~= sum_k w_k f(t + k h) / h^order over
    offsets k = -halfwidth..halfwidth, exact for polynomials of degree
    2 * halfwidth.

    Args:
        order (int): Derivative order (at least 1)
        halfwidth (int): Samples on each side of the centre (at least order / 2)

    Returns:
        np.ndarray: 2 * halfwidth + 1 weights

    Example:
        ```python
        stencil_weights(1, 1)  # [-0.5, 0.0, 0.5]
        stencil_weights(2, 1)  # [1.0, -2.0, 1.0]
        ```
    """
    if order < 1 or 2 * halfwidth < order:
        raise ValueError(
            f"A {2 * halfwidth + 1}-point stencil cannot give derivative order {order}"
        )
    return np.array(_weights(order, halfwidth))


def _derivative(x: np.ndarray, order: int, halfwidth: int, dt: float) -> np.ndarray:
    weights = stencil_weights(order, halfwidth)
    out = np.zeros(len(x))
    out[halfwidth : len(x) - halfwidth] = np.correlate(x, weights, mode="valid") / dt**order
    return out


def _interior(n: int, halfwidth: int) -> np.ndarray:
    valid = np.zeros(n, dtype=bool)
    valid[halfwidth : n - halfwidth] = True
    return valid


def _check_length(buffer: SignalBuffer, halfwidth: int) -> None:
    needed = 2 * halfwidth + 1
    if buffer.n_samples < needed:
        raise_for_errors(
            [
                ValidationIssue(
                    message=f"{buffer.n_samples} samples are too few for a "
                    f"{needed}-point stencil",
                    location="buffer.channels",
                    error_code="TOO_FEW_SAMPLES",
                )
            ]
        )


def differentiate(
    buffer: SignalBuffer,
    orders: Iterable[int] = (1, 2),
    cfg: Optional[DerivativeConfig] = None,
    nominal_hz: float = 50.0,
) -> PlanarTrajectory:
    """Builds a PlanarTrajectory from a two-channel buffer.

    Args:
        buffer (SignalBuffer): Exactly two channels (v1, v2), usually in pu
        orders (Iterable[int]): Derivative orders to compute, a subset of {1, 2, 3}
        cfg (Optional[DerivativeConfig]): Stencil settings; defaults apply if None
        nominal_hz (float): Nominal frequency stored on the trajectory

    Returns:
        PlanarTrajectory: Orders not requested are None. Samples within the
            widest stencil of either edge are zero and flagged invalid.

    Raises:
        ValidationError: If the buffer does not have two channels, an order is
            unsupported, or the buffer is shorter than the widest stencil
    """
    cfg = cfg or DerivativeConfig()
    orders = tuple(sorted(set(orders)))
    issues = validate_signal_buffer(buffer, min_samples=2)
    if len(buffer.channels) != 2:
        issues.append(
            ValidationIssue(
                message=f"differentiate() needs 2 channels, got {len(buffer.channels)}",
                location="buffer.channels",
                error_code="CHANNEL_COUNT",
            )
        )
    issues.extend(validate_derivative_config(cfg, orders))
    raise_for_errors(issues)

    widest = max((cfg.halfwidth_for(o) for o in orders), default=0)
    _check_length(buffer, widest)

    x1, x2 = (buffer.channel(name) for name in buffer.names)
    fields: Dict[str, np.ndarray] = {}
    for order in orders:
        halfwidth = cfg.halfwidth_for(order)
        fields[f"d{order}_v1"] = _derivative(x1, order, halfwidth, buffer.dt)
        fields[f"d{order}_v2"] = _derivative(x2, order, halfwidth, buffer.dt)

    logger.debug("Differentiated %d samples, orders %s", buffer.n_samples, orders)
    return PlanarTrajectory(
        t0=buffer.t0,
        dt=buffer.dt,
        v1=x1,
        v2=x2,
        valid=_interior(buffer.n_samples, widest),
        omega_nominal=2.0 * math.pi * nominal_hz,
        **fields,
    )


def quadrature_embed(
    v: SignalBuffer, cfg: Optional[DerivativeConfig] = None, nominal_hz: float = 50.0
) -> PlanarTrajectory:
    """Embeds a single-phase signal in the plane as (v, v').

    The trajectory carries first and second derivatives of the embedded curve,
    (v', v'') and (v'', v'''), so it needs derivatives of v up to order 3.

    Args:
        v (SignalBuffer): Exactly one channel
        cfg (Optional[DerivativeConfig]): Stencil settings
        nominal_hz (float): Nominal frequency stored on the trajectory

    Returns:
        PlanarTrajectory: Clockwise for a positive-frequency sinusoid

    Raises:
        ValidationError: If the buffer does not have one channel or is too short
    """
    cfg = cfg or DerivativeConfig()
    issues = validate_signal_buffer(v, min_samples=2)
    if len(v.channels) != 1:
        issues.append(
            ValidationIssue(
                message=f"quadrature_embed() needs 1 channel, got {len(v.channels)}",
                location="buffer.channels",
                error_code="CHANNEL_COUNT",
            )
        )
    issues.extend(validate_derivative_config(cfg, (1, 2, 3)))
    raise_for_errors(issues)

    widest = cfg.halfwidth_for(3)
    _check_length(v, widest)

    x = v.channel(v.names[0])
    d1 = _derivative(x, 1, cfg.halfwidth_for(1), v.dt)
    d2 = _derivative(x, 2, cfg.halfwidth_for(2), v.dt)
    d3 = _derivative(x, 3, cfg.halfwidth_for(3), v.dt)
    valid = _interior(v.n_samples, widest)
    return PlanarTrajectory(
        t0=v.t0,
        dt=v.dt,
        v1=x,
        v2=d1,
        d1_v1=d1,
        d1_v2=d2,
        d2_v1=d2,
        d2_v2=d3,
        valid=valid,
        omega_nominal=2.0 * math.pi * nominal_hz,
    )


def per_unit_base(buffer: SignalBuffer, nominal_hz: float = 50.0) -> float:
    """Amplitude used to express a buffer in per-unit.

    Computed over the first nominal cycle (or the whole buffer when shorter):
    sqrt(2) times the RMS for a single channel, and the RMS of the vector
    magnitude for several channels, which is the radius of a balanced
    (alpha, beta) circle.

    Returns:
        float: The base; 1.0 when the cycle is identically zero
    """
    n_cycle = max(1, int(round(buffer.sample_rate / nominal_hz)))
    window = np.vstack([x[:n_cycle] for x in buffer.channels.values()])
    if window.shape[0] == 1:
        base = math.sqrt(2.0) * float(np.sqrt(np.mean(window[0] ** 2)))
    else:
        base = float(np.sqrt(np.mean(np.sum(window**2, axis=0))))
    if not math.isfinite(base) or base <= _BASE_FLOOR:
        logger.warning("First nominal cycle is zero; using a per-unit base of 1.0")
        return 1.0
    return base


def normalize(
    buffer: SignalBuffer, base: Optional[float] = None, nominal_hz: float = 50.0
) -> Tuple[SignalBuffer, float]:
    """Divides every channel by a per-unit base.

    Args:
        buffer (SignalBuffer): Buffer in volts
        base (Optional[float]): Base to use; computed with per_unit_base if None
        nominal_hz (float): Nominal frequency for the base window

    Returns:
        Tuple[SignalBuffer, float]: The per-unit buffer and the base used
    """
    if buffer.units == Units.PU and base is None:
        return buffer, 1.0
    if base is None:
        base = per_unit_base(buffer, nominal_hz)
    scaled = {name: x / base for name, x in buffer.channels.items()}
    return buffer.replace_channels(scaled, units=Units.PU), base
