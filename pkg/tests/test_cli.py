# tests/test_cli.py

"""
Unit tests for the affinefreq command-line interface.

The tests verify:
1. Each subcommand writes the expected files and output
2. estimate gives the same traces as the library
3. compare is deterministic
4. Exit codes for invalid input and file errors
"""

import numpy as np
import pytest

from affinefreq import EstimatorConfig, EstimatorId, FrequencyEstimator, __version__
from affinefreq.cli import EXIT_FILE, EXIT_INVALID, EXIT_OK, build_argparser, main
from affinefreq.io import read_trace_csv, read_waveform_csv, write_scenario_file
from affinefreq.waveforms import get_scenario


def test_catalog(capsys):
    """Test that catalog lists the eight built-in scenarios."""
    assert main(["catalog"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert lines[0].split()[:4] == ["E1", "3-phase", "2", "s"]
    assert lines[-1].startswith("single-phase")
    assert "1-phase" in lines[-1]


def test_simulate_with_truth(tmp_path):
    """Test simulate with a duration override and a truth file."""
    out, truth = tmp_path / "e6.csv", tmp_path / "e6_truth.csv"
    code = main(
        ["simulate", "E6", "--duration", "0.05", "--out", str(out), "--truth", str(truth)]
    )
    assert code == EXIT_OK
    buffer = read_waveform_csv(out)
    assert buffer.names == ["a", "b", "c"]
    assert buffer.n_samples == 500
    traces, loaded_truth = read_trace_csv(truth)
    assert traces == []
    assert loaded_truth.if_trace[0] == pytest.approx(1.012566, abs=1e-6)


def test_simulate_dip_and_scenario_file(tmp_path):
    """Test the dip label and scenario files as simulate input."""
    out = tmp_path / "dip.csv"
    assert main(["simulate", "dip", "--duration", "0.1", "--out", str(out)]) == EXIT_OK
    assert read_waveform_csv(out).n_samples == 1000

    scenario = tmp_path / "one.ini"
    write_scenario_file(scenario, get_scenario("single-phase").with_overrides(duration=0.05))
    out = tmp_path / "one.csv"
    assert main(["simulate", str(scenario), "--out", str(out)]) == EXIT_OK
    assert read_waveform_csv(out).names == ["v"]


def test_estimate_matches_library(tmp_path):
    """Test that estimate writes the traces the library computes."""
    wave, out = tmp_path / "e3.csv", tmp_path / "e3_if.csv"
    assert main(["simulate", "E3", "--duration", "0.1", "--out", str(wave)]) == EXIT_OK
    code = main(
        ["estimate", "--in", str(wave), "--out", str(out), "--estimators", "affine,frenet"]
    )
    assert code == EXIT_OK

    config = EstimatorConfig(estimators=(EstimatorId.AFFINE, EstimatorId.FRENET))
    expected = FrequencyEstimator(config).estimate(read_waveform_csv(wave))
    traces, truth = read_trace_csv(out)
    assert truth is None
    assert [trace.name for trace in traces] == ["affine", "frenet"]
    for trace in traces:
        np.testing.assert_array_equal(trace.valid, expected[trace.name].valid)
        np.testing.assert_allclose(trace.omega, expected[trace.name].omega, atol=1e-9)


def test_estimate_with_filters(tmp_path):
    """Test that bare filter flags use the default cutoffs."""
    args = build_argparser().parse_args(
        ["estimate", "--in", "x.csv", "--out", "y.csv", "--prefilter", "--postfilter", "30"]
    )
    assert args.prefilter == 500.0
    assert args.postfilter == 30.0

    wave, out = tmp_path / "w.csv", tmp_path / "if.csv"
    main(["simulate", "E1", "--duration", "0.8", "--out", str(wave)])
    code = main(
        ["estimate", "--in", str(wave), "--out", str(out), "--prefilter", "--postfilter"]
    )
    assert code == EXIT_OK
    traces, _ = read_trace_csv(out)
    assert [trace.name for trace in traces] == ["affine", "frenet", "srf_pll"]
    assert not traces[0].valid[:2400].any()


def test_compare_is_deterministic(tmp_path, capsys):
    """Test that compare writes identical reports on repeated runs."""
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["compare", "E3", "--out", str(first)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert main(["compare", "E3", "--out", str(second)]) == EXIT_OK

    text = (tmp_path / "first.txt").read_text()
    assert stdout == text
    assert text.startswith("scenario: E3\n")
    assert (tmp_path / "first.txt").read_bytes() == (tmp_path / "second.txt").read_bytes()
    assert (tmp_path / "first.ini").read_bytes() == (tmp_path / "second.ini").read_bytes()


def test_invalid_input_exit_codes(tmp_path, capsys):
    """Test exit code 1 for usage, validation and unknown scenarios."""
    out = str(tmp_path / "r")
    assert main(["compare", "E9", "--out", out]) == EXIT_INVALID
    assert "Unknown scenario 'E9'" in capsys.readouterr().err

    assert main(["frobnicate"]) == EXIT_INVALID
    assert "usage:" in capsys.readouterr().err
    assert main(["catalog", "--bogus"]) == EXIT_INVALID
    assert main([]) == EXIT_INVALID
    assert main(["compare", "E1", "--out", out, "--estimators", "fourier"]) == EXIT_INVALID

    assert main(["compare", "E1", "--out", out, "--settle", "5"]) == EXIT_INVALID
    assert "settle window" in capsys.readouterr().err


@pytest.mark.parametrize(
    "scenario, estimators", [("single-phase", "srf_pll"), ("E1", "delay_pll")]
)
def test_estimate_without_applicable_estimator(tmp_path, capsys, scenario, estimators):
    """Test exit code 1 when no selected estimator fits the input layout."""
    wave, out = tmp_path / "w.csv", tmp_path / "if.csv"
    assert main(["simulate", scenario, "--duration", "0.1", "--out", str(wave)]) == EXIT_OK
    code = main(["estimate", "--in", str(wave), "--out", str(out), "--estimators", estimators])
    assert code == EXIT_INVALID
    assert "none of the estimators" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize("constant", ["1/0", "10.0**10**10"])
def test_scenario_file_with_bad_constant(tmp_path, capsys, constant):
    """Test that arithmetic errors in a scenario file give a file error exit code."""
    scenario = tmp_path / "bad.ini"
    write_scenario_file(scenario, get_scenario("single-phase").with_overrides(duration=0.05))
    lines = [
        f"magnitude = {constant}" if line.startswith("magnitude") else line
        for line in scenario.read_text().splitlines()
    ]
    scenario.write_text("\n".join(lines) + "\n")

    out = str(tmp_path / "w.csv")
    assert main(["simulate", str(scenario), "--out", out]) == EXIT_FILE
    assert "invalid constant" in capsys.readouterr().err
    assert main(["compare", str(scenario), "--out", str(tmp_path / "r")]) == EXIT_FILE


def test_file_error_exit_codes(tmp_path, capsys):
    """Test exit code 2 for missing and malformed files."""
    out = str(tmp_path / "if.csv")
    assert main(["estimate", "--in", str(tmp_path / "absent.csv"), "--out", out]) == EXIT_FILE

    bad = tmp_path / "bad.csv"
    bad.write_text("t,x\n0,1\n0.0001,2\n")
    assert main(["estimate", "--in", str(bad), "--out", out]) == EXIT_FILE
    assert "t,va,vb,vc" in capsys.readouterr().err

    config = tmp_path / "bad.ini"
    config.write_text("[estimator\n")
    assert (
        main(["estimate", "--in", str(bad), "--out", out, "--config", str(config)]) == EXIT_FILE
    )


def test_help_and_version(capsys):
    """Test that --help and --version exit with 0."""
    assert main(["--help"]) == EXIT_OK
    assert "simulate" in capsys.readouterr().out
    assert main(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out
