"""
Validation components of the affinefreq package.
"""

from .validators import (
    # Core Classes and Enums
    ValidationSeverity,
    ValidationIssue,
    raise_for_errors,
    # Inputs
    validate_scenario_spec,
    validate_signal_buffer,
    validate_trajectory_orders,
    # Estimator settings
    validate_derivative_config,
    validate_pll_config,
    validate_filter_design,
    validate_estimator_config,
    validate_settle_window,
)

__all__ = [
    # Core Classes and Enums
    "ValidationSeverity",
    "ValidationIssue",
    "raise_for_errors",
    # Inputs
    "validate_scenario_spec",
    "validate_signal_buffer",
    "validate_trajectory_orders",
    # Estimator settings
    "validate_derivative_config",
    "validate_pll_config",
    "validate_filter_design",
    "validate_estimator_config",
    "validate_settle_window",
]
