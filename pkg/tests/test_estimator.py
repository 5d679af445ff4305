# tests/test_estimator.py

"""
End-to-end tests of the FrequencyEstimator handler on the scenario catalog.

The tests verify:
1. Exactness on stationary balanced and unbalanced scenarios
2. The contrast between the affine and Frenet estimators under unbalance
3. Tracking accuracy under phase modulation, for three phases and one phase
4. Filtering, noise and degenerate inputs
5. Configuration handling (files, dicts, validation), skipped estimators and
   repair of short dropouts
"""

import logging
import math

import numpy as np
import pytest

from affinefreq import (
    EstimatorConfig,
    EstimatorId,
    FilterSpec,
    FrequencyEstimator,
    SignalBuffer,
    ValidationError,
    get_scenario,
)
from affinefreq.core.config import PhaseSpec, ScenarioSpec
from affinefreq.core.functions import Constant
from affinefreq.io import read_trace_csv, write_trace_csv
from affinefreq.waveforms import generate

GEOMETRIC = (EstimatorId.AFFINE, EstimatorId.FRENET)


def _evaluate(label, config=None, **overrides):
    spec = get_scenario(label)
    if overrides:
        spec = spec.with_overrides(**overrides)
    return FrequencyEstimator(config).evaluate(spec)


@pytest.mark.parametrize("label", ["E1", "E3", "E5"])
def test_stationary_analytic_exactness(label):
    """Test that exact derivatives give omega_a = 1 to rounding error."""
    estimator = FrequencyEstimator(EstimatorConfig(estimators=GEOMETRIC))
    traces = estimator.estimate_analytic(get_scenario(label).with_overrides(duration=0.2))
    assert list(traces) == ["affine", "frenet"]
    affine = traces["affine"]
    assert affine.valid.all()
    assert np.max(np.abs(affine.omega - 1.0)) < 1e-10


@pytest.mark.parametrize("label", ["E1", "E3", "E5"])
def test_stationary_numerical_accuracy(label):
    """Test that finite differences keep omega_a within 1e-4 of the truth."""
    result = _evaluate(label, duration=0.5)
    metrics = result.report["affine"]
    assert metrics.max_abs_error_pu < 1e-4
    # only the last stencil half-width is invalid
    assert metrics.fraction_valid == pytest.approx(1.0 - 2 / 3000)


def test_balanced_frenet_and_pll_agree():
    """Test that all three-phase estimators are exact on E1."""
    result = _evaluate("E1", duration=0.5)
    assert list(result.traces) == ["affine", "frenet", "srf_pll"]
    for name in result.traces:
        assert result.report[name].max_abs_error_pu < 1e-4


def test_magnitude_unbalance_e3():
    """Test the E3 contrast.

    This test verifies that:
    1. omega_a has no visible ripple
    2. omega_kappa swings over [7/9, 9/7], a peak-to-peak of 32/63
    3. The SRF-PLL shows a double-frequency ripple
    """
    report = _evaluate("E3").report
    assert report["affine"].ripple_pp_pu < 1e-3
    assert report["frenet"].ripple_pp_pu == pytest.approx(32 / 63, abs=0.01)
    assert report["srf_pll"].ripple_pp_pu > 1e-2


def test_displacement_unbalance_e5():
    """Test that phase-displacement unbalance affects only omega_kappa."""
    report = _evaluate("E5").report
    assert report["affine"].ripple_pp_pu < 1e-3
    assert report["frenet"].ripple_pp_pu > 0.1


def test_time_varying_unbalance_e4():
    """Test E4 without and with the 25 Hz postfilter."""
    raw = _evaluate("E4").report
    assert raw["affine"].ripple_pp_pu < 1e-2
    assert raw["frenet"].ripple_pp_pu > 0.1

    config = EstimatorConfig(estimators=GEOMETRIC, postfilter=FilterSpec(cutoff_hz=25.0))
    filtered = FrequencyEstimator(config).evaluate(get_scenario("E4"), settle_s=0.3).report
    assert filtered["affine"].ripple_pp_pu < 1e-3


def test_phase_modulation_e6():
    """Test tracking of the E6 phase modulation over 5 s."""
    config = EstimatorConfig(estimators=GEOMETRIC)
    report = _evaluate("E6", config).report
    assert report["affine"].rmse_pu < 2e-3
    assert report["affine"].max_abs_error_pu < 5e-3


def test_phase_modulation_unbalance_e7():
    """Test that omega_a beats omega_kappa when phase c is modulated differently."""
    config = EstimatorConfig(estimators=GEOMETRIC)
    report = _evaluate("E7", config).report
    assert report["affine"].rmse_pu < report["frenet"].rmse_pu
    assert report["frenet"].ripple_pp_pu > 5 * report["affine"].ripple_pp_pu


def test_single_phase():
    """Test the single-phase scenario against the delay PLL."""
    result = _evaluate("single-phase")
    assert list(result.traces) == ["affine", "frenet", "delay_pll"]
    report = result.report
    assert report["affine"].rmse_pu < 5e-3
    assert report["delay_pll"].ripple_pp_pu >= 3 * report["affine"].ripple_pp_pu


def test_single_phase_analytic():
    """Test exactness of the (v, v') embedding for a stationary single phase."""
    spec = ScenarioSpec(phases=(PhaseSpec(Constant(230.0 * math.sqrt(2))),), duration=0.1)
    traces = FrequencyEstimator().estimate_analytic(spec)
    for trace in traces.values():
        assert np.max(np.abs(trace.omega - 1.0)) < 1e-10


def test_noise_with_filters():
    """Test E3 at 60 dB SNR with the 500 Hz prefilter and 25 Hz postfilter."""
    config = EstimatorConfig(
        estimators=GEOMETRIC,
        prefilter=FilterSpec(cutoff_hz=500.0),
        postfilter=FilterSpec(cutoff_hz=25.0),
    )
    result = FrequencyEstimator(config).evaluate(
        get_scenario("E3").with_overrides(noise_snr_db=60.0, seed=0), settle_s=0.3
    )
    assert result.report["affine"].rmse_pu < 1e-2
    # prefilter and postfilter edges are excluded
    assert not result.traces["affine"].valid[:2400].any()


def test_degenerate_input(caplog):
    """Test that an all-zero input gives finite, flagged traces."""
    zeros = np.zeros(2000)
    buffer = SignalBuffer(t0=0.0, dt=1e-4, channels={"a": zeros, "b": zeros, "c": zeros})
    with caplog.at_level(logging.WARNING):
        traces = FrequencyEstimator().estimate(buffer)
    for name in ("affine", "frenet"):
        assert traces[name].fraction_valid == 0.0
        assert np.all(np.isfinite(traces[name].omega))
    assert np.all(np.isfinite(traces["srf_pll"].omega))
    assert "affine produced no valid samples" in caplog.text


def test_skipped_estimators_are_logged(caplog):
    """Test that inapplicable estimators are skipped with an INFO record."""
    buffer, _ = generate(get_scenario("single-phase").with_overrides(duration=0.2))
    with caplog.at_level(logging.INFO):
        traces = FrequencyEstimator().estimate(buffer)
    assert "srf_pll" not in traces
    assert "Skipping srf_pll" in caplog.text

    buffer, _ = generate(get_scenario("E1").with_overrides(duration=0.2))
    caplog.clear()
    with caplog.at_level(logging.INFO):
        traces = FrequencyEstimator().estimate(buffer)
    assert "delay_pll" not in traces
    assert "Skipping delay_pll" in caplog.text


def test_channel_layout_error():
    """Test that buffers without a, b, c or a single channel are rejected."""
    buffer = SignalBuffer(
        t0=0.0, dt=1e-4, channels={"x": np.ones(100), "y": np.ones(100)}
    )
    with pytest.raises(ValidationError) as exc_info:
        FrequencyEstimator().estimate(buffer)
    assert exc_info.value.issues[0].error_code == "CHANNEL_LAYOUT"


def test_trajectory_edges():
    """Test the per-unit trajectory and its edge flags."""
    buffer, _ = generate(get_scenario("E1").with_overrides(duration=0.1))
    traj = FrequencyEstimator().trajectory(buffer)
    assert not traj.valid[:2].any() and traj.valid[2:-2].all()
    np.testing.assert_allclose(traj.v1**2 + traj.v2**2, 1.0, rtol=1e-9)


def test_repair_invalid_option():
    """Test that repair_invalid fills short gaps but leaves them invalid."""
    config = EstimatorConfig(estimators=(EstimatorId.AFFINE,), repair_invalid=True)
    buffer, _ = generate(get_scenario("E1").with_overrides(duration=0.1))
    trace = FrequencyEstimator(config).estimate(buffer)["affine"]
    assert not trace.repaired.any()
    assert not trace.valid[:2].any()


def test_repaired_gap_reaches_trace_csv(tmp_path):
    """Test that a dropout is repaired and its values are written to the trace CSV."""
    buffer, _ = generate(get_scenario("E1").with_overrides(duration=0.1))
    channels = {name: np.array(buffer.channel(name)) for name in buffer.names}
    for samples in channels.values():
        samples[500:505] = 0.0
    buffer = buffer.replace_channels(channels)

    config = EstimatorConfig(estimators=(EstimatorId.AFFINE,), repair_invalid=True)
    trace = FrequencyEstimator(config).estimate(buffer)["affine"]
    assert not trace.valid[502]
    assert trace.repaired[502]
    assert not trace.repaired[:2].any() and not trace.repaired[-2:].any()
    assert not (trace.repaired & trace.valid).any()

    path = tmp_path / "if.csv"
    write_trace_csv(path, [trace])
    assert path.read_text().splitlines()[0] == "t,affine,affine_repaired"
    (loaded,), _ = read_trace_csv(path)
    np.testing.assert_array_equal(loaded.repaired, trace.repaired)
    np.testing.assert_array_equal(loaded.valid, trace.valid)
    np.testing.assert_allclose(
        loaded.omega[trace.repaired], trace.omega[trace.repaired], rtol=1e-11
    )


def test_no_applicable_estimator():
    """Test that a selection with no estimator for the input layout is rejected."""
    buffer, _ = generate(get_scenario("single-phase").with_overrides(duration=0.2))
    config = EstimatorConfig(estimators=(EstimatorId.SRF_PLL,))
    with pytest.raises(ValidationError) as exc_info:
        FrequencyEstimator(config).estimate(buffer)
    assert exc_info.value.issues[0].error_code == "NO_APPLICABLE_ESTIMATOR"


def test_handler_file_round_trip(tmp_path):
    """Test saving and loading the estimator configuration."""
    config = EstimatorConfig(
        nominal_hz=60.0, estimators=GEOMETRIC, postfilter=FilterSpec(cutoff_hz=25.0)
    )
    path = tmp_path / "estimator.ini"
    FrequencyEstimator(config).to_file(path)
    loaded = FrequencyEstimator.from_file(path, validate=True)
    assert loaded.config == config
    assert FrequencyEstimator.from_dict(loaded.to_dict()).config == config


def test_handler_missing_file(tmp_path):
    """Test that a missing configuration file raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError) as exc_info:
        FrequencyEstimator.from_file(tmp_path / "absent.ini")
    assert "File not found" in str(exc_info.value)


def test_handler_validation():
    """Test validate() with and without raising."""
    assert FrequencyEstimator().validate() is None

    bad = EstimatorConfig(guard=-1.0)
    issues = FrequencyEstimator(bad).validate(raise_exception=False)
    assert [issue.error_code for issue in issues] == ["GUARD"]

    with pytest.raises(ValidationError):
        FrequencyEstimator(bad, validate=True)
    with pytest.raises(ValidationError):
        FrequencyEstimator(bad).estimate(generate(get_scenario("E1").with_overrides(duration=0.1))[0])
