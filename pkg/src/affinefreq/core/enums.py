# affinefreq/core/enums.py

"""affinefreq enumerations.

String-valued enums used wherever a choice is serialized to a config file,
a CSV header or a report, so the value written is the value read back.

Available Enums:
    * EstimatorId - Frequency estimators that produce a FrequencyTrace
    * WaveformSchema - Column layouts accepted by the CSV reader
    * FilterMode - Causal or zero-phase filter application
    * Units - Units of SignalBuffer samples
    * DerivativeScheme - Numerical differentiation scheme

Example:
    ```python
    from affinefreq.core.enums import EstimatorId

    ids = [EstimatorId(name) for name in "affine,frenet".split(",")]
    ```
"""

from enum import Enum


class EstimatorId(Enum):
    """Frequency estimators.

    Values:
        AFFINE: sqrt([v', v'']/[v, v']), the affine-curvature estimator.
        FRENET: [v, v']/|v|^2, the Euclidean (Frenet frame) estimator.
        SRF_PLL: Synchronous-reference-frame PLL (three-phase input).
        DELAY_PLL: Transport-delay quadrature PLL (single-phase input).
    """

    AFFINE = "affine"
    FRENET = "frenet"
    SRF_PLL = "srf_pll"
    DELAY_PLL = "delay_pll"


class WaveformSchema(Enum):
    """Waveform CSV layouts.

    Values:
        THREE_PHASE: columns t, va, vb, vc.
        SINGLE_PHASE: columns t, v.
    """

    THREE_PHASE = "three_phase"
    SINGLE_PHASE = "single_phase"


class FilterMode(Enum):
    """How a biquad is applied to a sequence.

    Values:
        CAUSAL: single forward pass (streaming realism, adds phase lag).
        ZERO_PHASE: forward then backward pass (offline analysis).
    """

    CAUSAL = "causal"
    ZERO_PHASE = "zero_phase"


class Units(Enum):
    """Units of the samples held by a SignalBuffer."""

    VOLTS = "volts"
    PU = "pu"


class DerivativeScheme(Enum):
    """Numerical differentiation schemes."""

    CENTRAL = "central"
