# tests/test_waveforms.py

"""
Unit tests for synthetic waveform generation.

The tests verify:
1. The scenario catalog and lookup
2. Sampled voltages and analytic ground truth
3. Deterministic noise seeding
4. Analytic trajectories and the dip scenario
5. Error handling for invalid or non-symbolic scenarios
"""

import math

import numpy as np
import pytest

from affinefreq.core.config import HarmonicSpec, PhaseSpec, ScenarioSpec
from affinefreq.core.enums import Units
from affinefreq.core.errors import (
    ScenarioNotFoundError,
    UnsupportedSpecError,
    ValidationError,
)
from affinefreq.core.functions import Constant, Ramp
from affinefreq.waveforms import (
    SCENARIO_DESCRIPTIONS,
    SEED_ENV_VAR,
    analytic_trajectory,
    dip_scenario,
    generate,
    generate_single_phase,
    generate_three_phase,
    get_scenario,
    scenario_catalog,
)

OMEGA = 100.0 * math.pi


def _single_phase(magnitude=1000.0, phase_mod=None, duration=0.2):
    return ScenarioSpec(
        phases=(PhaseSpec(Constant(magnitude), phase_mod or Constant(0.0)),),
        duration=duration,
        label="test",
    )


def test_catalog_contents():
    """Test that the catalog holds the eight scenarios in order."""
    catalog = scenario_catalog()
    assert list(catalog) == ["E1", "E2", "E3", "E4", "E5", "E6", "E7", "single-phase"]
    assert set(SCENARIO_DESCRIPTIONS) == set(catalog)
    for label in ("E1", "E2", "E3", "E4", "E5"):
        assert catalog[label].duration == 2.0
    for label in ("E6", "E7", "single-phase"):
        assert catalog[label].duration == 5.0
    assert all(spec.sample_rate == 10_000.0 for spec in catalog.values())
    assert catalog["single-phase"].is_three_phase is False


def test_get_scenario_unknown():
    """Test that unknown labels raise ScenarioNotFoundError (a KeyError)."""
    with pytest.raises(ScenarioNotFoundError) as exc_info:
        get_scenario("E9")
    assert "E9" in str(exc_info.value)
    assert "E1" in exc_info.value.available
    assert isinstance(exc_info.value, KeyError)


def test_e1_samples_and_truth():
    """Test that E1 is a balanced 50 Hz set with a constant unit truth."""
    buffer, truth = generate_three_phase(get_scenario("E1").with_overrides(duration=0.1))
    t = buffer.time
    assert buffer.names == ["a", "b", "c"]
    assert buffer.units == Units.VOLTS
    assert buffer.n_samples == 1000
    np.testing.assert_allclose(buffer.channel("a"), 12000 * np.sin(OMEGA * t), atol=1e-8)
    np.testing.assert_allclose(
        buffer.channel("b"), 12000 * np.sin(OMEGA * t - 2 * math.pi / 3), atol=1e-8
    )
    np.testing.assert_allclose(
        buffer.channel("c"), 12000 * np.sin(OMEGA * t + 2 * math.pi / 3), atol=1e-8
    )
    np.testing.assert_array_equal(truth.if_trace, np.ones(1000))
    assert sorted(truth.per_phase) == ["a", "b", "c"]


def test_stationary_scenario_is_periodic():
    """Test that a stationary scenario repeats every nominal period."""
    buffer, _ = generate(get_scenario("E3").with_overrides(duration=0.1))
    for name in buffer.names:
        x = buffer.channel(name)
        np.testing.assert_allclose(x[200:], x[:-200], atol=1e-6)


def test_e6_truth():
    """Test the E6 phase-modulation ground truth."""
    _, truth = generate(get_scenario("E6").with_overrides(duration=0.1))
    assert truth.if_trace[0] == pytest.approx(1.012566, abs=1e-6)
    t = truth.time
    expected = 1 + 0.4 * math.pi**2 * np.cos(0.4 * math.pi * t) / OMEGA
    np.testing.assert_allclose(truth.if_trace, expected, atol=1e-12)


def test_e7_per_phase_truth():
    """Test that E7 exposes a different truth for phase c."""
    _, truth = generate(get_scenario("E7").with_overrides(duration=0.1))
    np.testing.assert_array_equal(truth.if_trace, truth.per_phase["a"])
    np.testing.assert_allclose(truth.per_phase["a"], truth.per_phase["b"])
    assert truth.per_phase["c"][0] - 1 == pytest.approx(1.1 * (truth.per_phase["a"][0] - 1))


def test_single_phase_truth():
    """Test single-phase ground truth for the catalog and simple modulations."""
    buffer, truth = generate_single_phase(
        get_scenario("single-phase").with_overrides(duration=0.1)
    )
    assert buffer.names == ["v"]
    assert truth.if_trace[0] == pytest.approx(1.0, abs=1e-12)

    _, truth = generate(_single_phase(phase_mod=Constant(0.3)))
    np.testing.assert_array_equal(truth.if_trace, np.ones(truth.n_samples))

    _, truth = generate(_single_phase(phase_mod=Ramp(5.0)))
    np.testing.assert_allclose(truth.if_trace, 1 + 5.0 / OMEGA)


def test_generate_validation_errors():
    """Test that invalid scenarios raise ValidationError."""
    with pytest.raises(ValidationError) as exc_info:
        generate(get_scenario("E1").with_overrides(duration=0.0))
    assert exc_info.value.issues[0].error_code == "DURATION_NOT_POSITIVE"

    with pytest.raises(ValidationError) as exc_info:
        generate_three_phase(_single_phase())
    assert exc_info.value.issues[0].error_code == "PHASE_COUNT"

    with pytest.raises(ValidationError):
        generate_single_phase(get_scenario("E1"))

    with pytest.raises(ValidationError) as exc_info:
        generate(_single_phase(magnitude=-5.0))
    assert exc_info.value.issues[0].error_code == "MAGNITUDE_NOT_POSITIVE"


def test_generate_non_symbolic_function():
    """Test that plain callables cannot be generated."""
    spec = ScenarioSpec(
        phases=(PhaseSpec(magnitude_fn=lambda t: 1000.0 + 0 * t),), duration=0.1
    )
    with pytest.raises(UnsupportedSpecError):
        generate(spec)


def test_noise_is_deterministic(monkeypatch):
    """Test the noise seed fallback order."""
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    spec = get_scenario("E1").with_overrides(duration=0.1, noise_snr_db=40.0)
    first, _ = generate(spec)
    second, _ = generate(spec)
    assert first.equals(second)

    seeded, _ = generate(spec.with_overrides(seed=5))
    assert not seeded.equals(first)
    default, _ = generate(spec.with_overrides(seed=0))
    assert default.equals(first)

    monkeypatch.setenv(SEED_ENV_VAR, "5")
    from_env, _ = generate(spec)
    assert from_env.equals(seeded)


def test_noise_level():
    """Test that the added noise has the requested signal-to-noise ratio."""
    clean, _ = generate(get_scenario("E1").with_overrides(duration=1.0))
    noisy, _ = generate(get_scenario("E1").with_overrides(duration=1.0, noise_snr_db=20.0, seed=1))
    noise = noisy.channel("a") - clean.channel("a")
    snr = 10 * math.log10(np.mean(clean.channel("a") ** 2) / np.mean(noise**2))
    assert snr == pytest.approx(20.0, abs=0.2)


def test_analytic_trajectory_three_phase():
    """Test that a balanced scenario traces the unit circle in pu."""
    traj = analytic_trajectory(get_scenario("E1").with_overrides(duration=0.1))
    radius2 = traj.v1**2 + traj.v2**2
    np.testing.assert_allclose(radius2, 1.0, atol=1e-9)
    assert traj.has_orders(1, 2, 3)
    assert traj.valid.all()
    # velocity of a unit circle at omega_o
    speed = np.hypot(traj.d1_v1, traj.d1_v2)
    np.testing.assert_allclose(speed, OMEGA, rtol=1e-9)


def test_analytic_trajectory_single_phase():
    """Test the (v, v') embedding of a single-phase scenario."""
    spec = _single_phase(magnitude=1000.0)
    traj = analytic_trajectory(spec)
    t = traj.time
    np.testing.assert_allclose(traj.v1, np.sin(OMEGA * t), atol=1e-9)
    np.testing.assert_allclose(traj.v2, OMEGA * np.cos(OMEGA * t), atol=1e-6)
    np.testing.assert_array_equal(traj.d1_v1, traj.v2)
    assert traj.has_orders(1, 2)


def test_analytic_trajectory_includes_harmonics():
    """Test that harmonics are part of the analytic trajectory."""
    spec = _single_phase()
    with_harmonic = spec.with_overrides(
        phases=(PhaseSpec(Constant(1000.0), harmonics=(HarmonicSpec(3, 0.1),)),)
    )
    clean = analytic_trajectory(spec, base=1000.0)
    distorted = analytic_trajectory(with_harmonic, base=1000.0)
    t = clean.time
    np.testing.assert_allclose(
        distorted.v1 - clean.v1, 0.1 * np.sin(3 * OMEGA * t), atol=1e-9
    )


def test_dip_scenario():
    """Test the smooth dip scenario and its truth at the dip edge."""
    spec = dip_scenario()
    assert spec.is_three_phase
    assert spec.label == "dip"
    buffer, truth = generate(spec)
    assert buffer.n_samples == 10_000

    # phase jump 0.2 rad with edge time constant 5 ms
    assert truth.if_trace[3000] == pytest.approx(1 + 0.2 / (4 * 0.005) / OMEGA, rel=1e-6)
    assert truth.if_trace[4000] == pytest.approx(1.0, abs=1e-6)
    assert truth.if_trace[100] == pytest.approx(1.0, abs=1e-9)

    during = np.abs(buffer.channel("b")[3800:4200]).max()
    before = np.abs(buffer.channel("b")[1000:1400]).max()
    assert during == pytest.approx(0.3 * before, rel=1e-3)


def test_dip_scenario_single_phase_and_errors():
    """Test a one-phase dip and mismatched phase jumps."""
    spec = dip_scenario(depths=(0.5,), phase_jump=0.1)
    assert not spec.is_three_phase
    with pytest.raises(ValueError):
        dip_scenario(depths=(0.4, 0.7, 0.4), phase_jump=(0.1, 0.2))
