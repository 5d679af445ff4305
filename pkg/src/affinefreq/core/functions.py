# affinefreq/core/functions.py

"""Closed algebra of time functions with symbolic derivatives.

Scenario magnitudes V_i(t) and phase modulations phi_i(t) are built from a
handful of terms so that they can be differentiated exactly (ground-truth
frequency, slow-variation margins, analytic trajectories) and written to
config files as text descriptors.

Terms:
    * Constant(c)                     c
    * Ramp(slope)                     slope * t
    * Sinusoid(amplitude, omega, phase)  amplitude * sin(omega * t + phase)
    * ExpDecay(amplitude, rate)       amplitude * exp(-rate * t)
    * Logistic(center, width)         1 / (1 + exp(-(t - center) / width))
    * Sum(terms), Product(factors), Scale(factor, term)

Descriptors are function-call expressions, e.g.::

    sum(const(12000), sin(3000, pi, 0))
    scale(0.05*100*pi, mul(exp(1, 1), sum(const(1), sin(-1, pi, pi/2))))

Example:
    ```python
    from affinefreq.core.functions import parse_function

    phi = parse_function("sin(pi, 0.4*pi, 0)")
    phi_dot = phi.derivative()
    print(phi_dot(0.0))  # 0.4 * pi**2
    ```
"""

import ast
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np

from .errors import UnsupportedSpecError

ArrayLike = Union[float, np.ndarray]


def _fmt(value: float) -> str:
    return repr(float(value))


class TimeFunction(ABC):
    """A differentiable function of time (seconds)."""

    @abstractmethod
    def __call__(self, t: ArrayLike) -> np.ndarray:
        """Evaluates the function at time(s) ``t``."""

    @abstractmethod
    def _derivative(self) -> "TimeFunction":
        """Returns the first derivative."""

    @abstractmethod
    def to_descriptor(self) -> str:
        """Returns the text descriptor understood by parse_function."""

    def derivative(self, order: int = 1) -> "TimeFunction":
        """Returns the ``order``-th derivative as a new TimeFunction.

        Args:
            order: Derivative order (0 returns self)

        Raises:
            ValueError: If order is negative
        """
        if order < 0:
            raise ValueError(f"Derivative order must be non-negative, got {order}")
        result: TimeFunction = self
        for _ in range(order):
            result = result._derivative()
        return result

    @property
    def is_zero(self) -> bool:
        return False

    def __str__(self) -> str:
        return self.to_descriptor()


@dataclass(frozen=True)
class Constant(TimeFunction):
    value: float

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return np.full_like(np.asarray(t, dtype=float), self.value)

    def _derivative(self) -> TimeFunction:
        return ZERO

    def to_descriptor(self) -> str:
        return f"const({_fmt(self.value)})"

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0


@dataclass(frozen=True)
class Ramp(TimeFunction):
    slope: float

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self.slope * np.asarray(t, dtype=float)

    def _derivative(self) -> TimeFunction:
        return Constant(self.slope)

    def to_descriptor(self) -> str:
        return f"ramp({_fmt(self.slope)})"

    @property
    def is_zero(self) -> bool:
        return self.slope == 0.0


@dataclass(frozen=True)
class Sinusoid(TimeFunction):
    """amplitude * sin(omega * t + phase); use phase = pi/2 for a cosine."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.sin(self.omega * t + self.phase)

    def _derivative(self) -> TimeFunction:
        if self.omega == 0.0:
            return ZERO
        return Sinusoid(
            self.amplitude * self.omega, self.omega, self.phase + math.pi / 2
        )

    def to_descriptor(self) -> str:
        return (
            f"sin({_fmt(self.amplitude)}, {_fmt(self.omega)}, {_fmt(self.phase)})"
        )

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0


@dataclass(frozen=True)
class ExpDecay(TimeFunction):
    """amplitude * exp(-rate * t)."""

    amplitude: float
    rate: float

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-self.rate * t)

    def _derivative(self) -> TimeFunction:
        return ExpDecay(-self.rate * self.amplitude, self.rate)

    def to_descriptor(self) -> str:
        return f"exp({_fmt(self.amplitude)}, {_fmt(self.rate)})"

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0


@dataclass(frozen=True)
class Logistic(TimeFunction):
    """Smooth unit step centred at ``center`` with time constant ``width``."""

    center: float
    width: float

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        # tanh form avoids overflow of exp for large |t - center| / width
        return 0.5 * (1.0 + np.tanh((t - self.center) / (2.0 * self.width)))

    def _derivative(self) -> TimeFunction:
        # s' = s (1 - s) / w
        return scale(1.0 / self.width, add(self, scale(-1.0, multiply(self, self))))

    def to_descriptor(self) -> str:
        return f"logistic({_fmt(self.center)}, {_fmt(self.width)})"


@dataclass(frozen=True)
class Sum(TimeFunction):
    terms: Tuple[TimeFunction, ...]

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for term in self.terms:
            total = total + term(t)
        return total

    def _derivative(self) -> TimeFunction:
        return add(*(term._derivative() for term in self.terms))

    def to_descriptor(self) -> str:
        return "sum(" + ", ".join(t.to_descriptor() for t in self.terms) + ")"


@dataclass(frozen=True)
class Product(TimeFunction):
    factors: Tuple[TimeFunction, ...]

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        total = np.ones_like(t)
        for factor in self.factors:
            total = total * factor(t)
        return total

    def _derivative(self) -> TimeFunction:
        terms = []
        for i, factor in enumerate(self.factors):
            others = self.factors[:i] + self.factors[i + 1 :]
            terms.append(multiply(factor._derivative(), *others))
        return add(*terms)

    def to_descriptor(self) -> str:
        return "mul(" + ", ".join(f.to_descriptor() for f in self.factors) + ")"


@dataclass(frozen=True)
class Scale(TimeFunction):
    factor: float
    term: TimeFunction

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self.factor * self.term(t)

    def _derivative(self) -> TimeFunction:
        return scale(self.factor, self.term._derivative())

    def to_descriptor(self) -> str:
        return f"scale({_fmt(self.factor)}, {self.term.to_descriptor()})"


ZERO = Constant(0.0)


#
# Folding constructors: keep derivative trees small
#
def add(*terms: TimeFunction) -> TimeFunction:
    """Sum of terms, dropping zeros and flattening nested sums."""
    flat = []
    for term in terms:
        if term.is_zero:
            continue
        if isinstance(term, Sum):
            flat.extend(term.terms)
        else:
            flat.append(term)
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def multiply(*factors: TimeFunction) -> TimeFunction:
    """Product of factors; any zero factor collapses the product."""
    flat = []
    coefficient = 1.0
    for factor in factors:
        if factor.is_zero:
            return ZERO
        if isinstance(factor, Constant):
            coefficient *= factor.value
        elif isinstance(factor, Product):
            flat.extend(factor.factors)
        else:
            flat.append(factor)
    if not flat:
        return Constant(coefficient)
    core = flat[0] if len(flat) == 1 else Product(tuple(flat))
    return scale(coefficient, core)


def scale(factor: float, term: TimeFunction) -> TimeFunction:
    """factor * term, folding constants and nested scales."""
    if factor == 0.0 or term.is_zero:
        return ZERO
    if factor == 1.0:
        return term
    if isinstance(term, Constant):
        return Constant(factor * term.value)
    if isinstance(term, Scale):
        return scale(factor * term.factor, term.term)
    return Scale(factor, term)


#
# Descriptor parsing
#
_NAMES: Dict[str, float] = {"pi": math.pi, "e": math.e}

_TERMINALS: Dict[str, Callable[..., TimeFunction]] = {
    "const": Constant,
    "ramp": Ramp,
    "sin": Sinusoid,
    "exp": ExpDecay,
    "logistic": Logistic,
}


def _number(node: ast.AST, text: str) -> float:
    try:
        value = _evaluate(node, text)
    except ArithmeticError as e:
        raise ValueError(f"invalid constant in {text!r}: {e}") from e
    if isinstance(value, complex) or not math.isfinite(value):
        raise ValueError(f"invalid constant in {text!r}: not a finite real number")
    return value


def _evaluate(node: ast.AST, text: str) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _evaluate(node.operand, text)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp):
        left, right = _evaluate(node.left, text), _evaluate(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
        if isinstance(node.op, ast.Pow):
            return left**right
    raise ValueError(f"Invalid numeric expression in function descriptor '{text}'")


def _build(node: ast.AST, text: str) -> TimeFunction:
    if not isinstance(node, ast.Call) or not isinstance(node.func, ast.Name):
        # A bare number is shorthand for const(number)
        return Constant(_number(node, text))
    name = node.func.id
    if node.keywords:
        raise ValueError(f"Keyword arguments are not supported in '{text}'")
    if name in _TERMINALS:
        args = [_number(arg, text) for arg in node.args]
        try:
            return _TERMINALS[name](*args)
        except TypeError as e:
            raise ValueError(f"Wrong number of arguments for {name}() in '{text}'") from e
    children = [_build(arg, text) for arg in node.args]
    if name == "sum":
        return Sum(tuple(children)) if len(children) > 1 else add(*children)
    if name == "mul":
        return Product(tuple(children)) if len(children) > 1 else multiply(*children)
    if name == "scale":
        if len(node.args) != 2:
            raise ValueError(f"scale() takes (factor, function) in '{text}'")
        return Scale(_number(node.args[0], text), children[1])
    raise ValueError(f"Unknown function '{name}' in descriptor '{text}'")


def parse_function(text: str) -> TimeFunction:
    """Parses a function descriptor into a TimeFunction.

    Args:
        text: Descriptor such as ``"sum(const(12000), sin(3000, pi, 0))"``

    Returns:
        TimeFunction: The parsed function

    Raises:
        ValueError: If the descriptor is malformed or uses unknown terms
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ValueError(f"Malformed function descriptor '{text}': {e.msg}") from e
    return _build(tree.body, text)


def require_symbolic(fn: object, location: str) -> TimeFunction:
    """Returns ``fn`` if it belongs to the algebra, else raises.

    Raises:
        UnsupportedSpecError: If fn is not a TimeFunction
    """
    if not isinstance(fn, TimeFunction):
        raise UnsupportedSpecError(
            f"{location}: {type(fn).__name__} cannot be differentiated symbolically; "
            "build it from const/ramp/sin/exp/logistic/sum/mul/scale"
        )
    return fn


def derivatives(fn: TimeFunction, t: np.ndarray, max_order: int) -> Sequence[np.ndarray]:
    """Evaluates fn and its derivatives up to max_order at times t."""
    return [fn.derivative(k)(t) for k in range(max_order + 1)]
