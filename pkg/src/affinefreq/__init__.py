# src/affinefreq/__init__.py

"""
affinefreq: affine-geometric instantaneous frequency estimation.

Estimates the instantaneous frequency of three-phase and single-phase AC
voltages from the affine curvature of the voltage trajectory, with Frenet
and PLL baselines, a synthetic scenario generator with exact ground truth
and CSV ingestion of measured waveforms.
"""

__version__ = "0.1.0"

from .core.config import (
    DerivativeConfig,
    EstimatorConfig,
    FilterSpec,
    HarmonicSpec,
    PhaseSpec,
    PllConfig,
    ScenarioSpec,
)
from .core.data_classes import (
    FrequencyTrace,
    GroundTruth,
    MetricsReport,
    PlanarTrajectory,
    SignalBuffer,
)
from .core.enums import EstimatorId, FilterMode, Units, WaveformSchema
from .core.errors import (
    AffineFreqError,
    ParseError,
    ScenarioNotFoundError,
    SchemaError,
    UnsupportedSpecError,
    ValidationError,
    WaveformFormatError,
)
from .estimator import Evaluation, FrequencyEstimator
from .validation import ValidationIssue
from .waveforms import generate, get_scenario, scenario_catalog

__all__ = [
    "DerivativeConfig",
    "EstimatorConfig",
    "FilterSpec",
    "HarmonicSpec",
    "PhaseSpec",
    "PllConfig",
    "ScenarioSpec",
    "FrequencyTrace",
    "GroundTruth",
    "MetricsReport",
    "PlanarTrajectory",
    "SignalBuffer",
    "EstimatorId",
    "FilterMode",
    "Units",
    "WaveformSchema",
    "AffineFreqError",
    "ParseError",
    "ScenarioNotFoundError",
    "SchemaError",
    "UnsupportedSpecError",
    "ValidationError",
    "WaveformFormatError",
    "Evaluation",
    "FrequencyEstimator",
    "ValidationIssue",
    "generate",
    "get_scenario",
    "scenario_catalog",
]
