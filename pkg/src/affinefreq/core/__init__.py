# affinefreq/core/__init__.py

"""Core components of the affinefreq package."""

from .config import (
    DerivativeConfig,
    EstimatorConfig,
    FilterSpec,
    HarmonicSpec,
    PhaseSpec,
    PllConfig,
    ScenarioSpec,
)
from .data_classes import (
    AffineInvariants,
    BiquadCoeffs,
    EstimatorMetrics,
    FrequencyTrace,
    GroundTruth,
    MetricsReport,
    PlanarTrajectory,
    SignalBuffer,
    ValidityReport,
)
from .enums import DerivativeScheme, EstimatorId, FilterMode, Units, WaveformSchema

__all__ = [
    "DerivativeConfig",
    "EstimatorConfig",
    "FilterSpec",
    "HarmonicSpec",
    "PhaseSpec",
    "PllConfig",
    "ScenarioSpec",
    "AffineInvariants",
    "BiquadCoeffs",
    "EstimatorMetrics",
    "FrequencyTrace",
    "GroundTruth",
    "MetricsReport",
    "PlanarTrajectory",
    "SignalBuffer",
    "ValidityReport",
    "DerivativeScheme",
    "EstimatorId",
    "FilterMode",
    "Units",
    "WaveformSchema",
]
