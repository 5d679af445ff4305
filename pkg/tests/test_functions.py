# tests/test_functions.py

"""
Unit tests for the closed time-function algebra.

The tests verify:
1. Evaluation and symbolic derivatives of every term
2. Folding constructors (add, multiply, scale)
3. Descriptor parsing and printing
4. Rejection of malformed descriptors and non-algebra callables
"""

import math

import numpy as np
import pytest

from affinefreq.core.errors import UnsupportedSpecError
from affinefreq.core.functions import (
    ZERO,
    Constant,
    ExpDecay,
    Logistic,
    Product,
    Ramp,
    Scale,
    Sinusoid,
    Sum,
    add,
    derivatives,
    multiply,
    parse_function,
    require_symbolic,
    scale,
)

T = np.linspace(0.0, 2.0, 401)


def _numerical_derivative(fn, t, h=1e-5):
    return (fn(t + h) - fn(t - h)) / (2 * h)


def test_constant_and_ramp():
    """Test constant and ramp evaluation and derivatives."""
    np.testing.assert_array_equal(Constant(3.0)(T), np.full_like(T, 3.0))
    assert Constant(3.0).derivative() == ZERO
    np.testing.assert_allclose(Ramp(2.5)(T), 2.5 * T)
    assert Ramp(2.5).derivative() == Constant(2.5)
    assert Ramp(2.5).derivative(2).is_zero


def test_sinusoid_derivatives():
    """Test that sinusoid derivatives are exact."""
    fn = Sinusoid(3.0, 2.0 * math.pi, 0.3)
    d1, d2 = fn.derivative(1), fn.derivative(2)
    np.testing.assert_allclose(
        d1(T), 3.0 * 2.0 * math.pi * np.cos(2.0 * math.pi * T + 0.3), atol=1e-9
    )
    np.testing.assert_allclose(
        d2(T), -3.0 * (2.0 * math.pi) ** 2 * np.sin(2.0 * math.pi * T + 0.3), atol=1e-9
    )
    assert Sinusoid(1.0, 0.0).derivative().is_zero


def test_exp_decay_and_logistic():
    """Test exponential decay and logistic derivatives against finite differences."""
    decay = ExpDecay(2.0, 1.5)
    np.testing.assert_allclose(decay.derivative()(T), -3.0 * np.exp(-1.5 * T), atol=1e-12)

    step = Logistic(1.0, 0.05)
    assert step(np.array([1.0]))[0] == pytest.approx(0.5)
    np.testing.assert_allclose(
        step.derivative()(T), _numerical_derivative(step, T), rtol=1e-6, atol=1e-6
    )
    assert step.derivative()(np.array([1.0]))[0] == pytest.approx(1.0 / (4 * 0.05))


def test_product_and_sum_derivatives():
    """Test product and sum rules."""
    fn = Product((Ramp(2.0), Ramp(3.0)))  # 6 t^2
    np.testing.assert_allclose(fn(T), 6.0 * T**2)
    np.testing.assert_allclose(fn.derivative()(T), 12.0 * T)
    np.testing.assert_allclose(fn.derivative(2)(T), np.full_like(T, 12.0))

    total = Sum((Constant(1.0), Sinusoid(1.0, 1.0)))
    np.testing.assert_allclose(total.derivative()(T), np.cos(T), atol=1e-12)


def test_folding_constructors():
    """Test that add, multiply and scale fold constants and zeros."""
    assert add(ZERO, Constant(1.0)) == Constant(1.0)
    assert add() == ZERO
    assert multiply(Constant(2.0), Constant(3.0)) == Constant(6.0)
    assert multiply(Ramp(1.0), ZERO) == ZERO
    assert scale(0.0, Ramp(1.0)) == ZERO
    assert scale(1.0, Ramp(1.0)) == Ramp(1.0)
    assert scale(2.0, scale(3.0, Ramp(1.0))) == Scale(6.0, Ramp(1.0))


def test_derivative_order_validation():
    """Test that negative derivative orders are rejected."""
    with pytest.raises(ValueError):
        Ramp(1.0).derivative(-1)
    assert Ramp(1.0).derivative(0) == Ramp(1.0)


def test_derivatives_helper():
    """Test that derivatives() returns the function and its derivatives in order."""
    values = derivatives(Sinusoid(1.0, 1.0), T, 2)
    assert len(values) == 3
    np.testing.assert_allclose(values[0], np.sin(T))
    np.testing.assert_allclose(values[1], np.cos(T), atol=1e-12)
    np.testing.assert_allclose(values[2], -np.sin(T), atol=1e-12)


def test_parse_function():
    """Test parsing descriptors, including arithmetic and named constants."""
    fn = parse_function("sum(const(12000), sin(3000, pi, 0))")
    assert fn(np.array([0.5]))[0] == pytest.approx(15000.0)

    assert parse_function("12000") == Constant(12000.0)
    assert parse_function("sin(pi, 0.4*pi, 0)") == Sinusoid(math.pi, 0.4 * math.pi, 0.0)
    assert parse_function("ramp(-2**3)") == Ramp(-8.0)

    nested = parse_function(
        "scale(0.05*100*pi, mul(exp(1, 1), sum(const(1), sin(-1, pi, pi/2))))"
    )
    assert isinstance(nested, Scale)
    assert nested(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "text",
    [
        "sum(const(12000.0), sin(3000.0, 3.141592653589793, 0.0))",
        "scale(2.0, mul(exp(1.0, 1.0), logistic(0.3, 0.005)))",
        "ramp(0.5)",
    ],
)
def test_descriptor_round_trip(text):
    """Test that printing a parsed descriptor gives the same function back."""
    fn = parse_function(text)
    assert fn.to_descriptor() == text
    assert parse_function(fn.to_descriptor()) == fn


@pytest.mark.parametrize(
    "text",
    ["foo(1)", "sin(1)", "sin(1, 2", "sin(amplitude=1, omega=2)", "ramp(x)", "scale(2)"],
)
def test_parse_function_errors(text):
    """Test that malformed descriptors raise ValueError."""
    with pytest.raises(ValueError):
        parse_function(text)


@pytest.mark.parametrize(
    "text", ["1/0", "const(1/0)", "10.0**10**10", "sin(1, (-1)**0.5, 0)", "const(1e400)"]
)
def test_parse_function_bad_constants(text):
    """Test that division by zero, overflow and non-real constants raise ValueError."""
    with pytest.raises(ValueError) as exc_info:
        parse_function(text)
    assert "invalid constant" in str(exc_info.value)


def test_require_symbolic():
    """Test that non-algebra callables are rejected."""
    assert require_symbolic(Ramp(1.0), "x") == Ramp(1.0)
    with pytest.raises(UnsupportedSpecError) as exc_info:
        require_symbolic(lambda t: t, "scenario.phases[0].magnitude")
    assert "scenario.phases[0].magnitude" in str(exc_info.value)
