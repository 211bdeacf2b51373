"""Activation functions with analytic first and second derivatives.

Serf is ``x * erf(softplus(x))``. Its derivative splits as

    serf'(x) = p(x) * swish(x) + erf(softplus(x)),
    p(x)     = (2/sqrt(pi)) * exp(-softplus(x)**2),

where the last term equals serf(x)/x away from zero and stays finite at zero.
Second derivatives of the smooth kinds are closed forms checked against
finite differences in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from serf.scalar_math import (
    _finish,
    erf,
    erf_derivative,
    normal_cdf,
    normal_pdf,
    sigmoid,
    sigmoid_derivative,
    softplus,
    tanh_derivative,
)

SELU_ALPHA = 1.6732632423543772848170429916717
SELU_SCALE = 1.0507009873554804934193349852946


def _arr(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


# --- Serf -----------------------------------------------------------------


def serf(x):
    x = _arr(x)
    return _finish(x * erf(softplus(x)), x)


@dataclass(frozen=True)
class SerfDecomposition:
    """Pieces of serf'(x) = precond * swish_val + gate."""

    precond: float
    swish_val: float
    gate: float
    total: float

    @property
    def residual(self) -> float:
        return abs(self.precond * self.swish_val + self.gate - self.total)


def _serf_parts(x: np.ndarray):
    s = softplus(x)
    precond = erf_derivative(s)
    swish_val = x * sigmoid(x)
    gate = erf(s)
    return precond, swish_val, gate


def serf_grad(x):
    x = _arr(x)
    precond, swish_val, gate = _serf_parts(x)
    return _finish(precond * swish_val + gate, x)


def serf_decompose(x) -> SerfDecomposition:
    x = _arr(x)
    precond, swish_val, gate = _serf_parts(x)
    total = precond * swish_val + gate
    return SerfDecomposition(
        _finish(precond, x), _finish(swish_val, x), _finish(gate, x), _finish(total, x)
    )


def serf_second_grad(x):
    # p(s) sigma(x) [2 - 2 x s sigma(x) + x (1 - sigma(x))], s = softplus(x)
    x = _arr(x)
    s = softplus(x)
    sig = sigmoid(x)
    pref = erf_derivative(s) * sig
    xp = pref * x
    out = 2.0 * pref - 2.0 * xp * (s * sig) + xp * sigmoid(-x)
    return _finish(out, x)


# --- the family -------------------------------------------------------------


@dataclass(frozen=True)
class Activation:
    """Base class; subclasses are immutable and hold only their parameters."""

    name = "base"
    # True when some derivative is discontinuous at 0, which finite
    # differences straddling the origin cannot resolve.
    kinked = False

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def second_grad(self, x):
        raise NotImplementedError

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Serf(Activation):
    name = "serf"

    def value(self, x):
        return serf(x)

    def grad(self, x):
        return serf_grad(x)

    def second_grad(self, x):
        return serf_second_grad(x)


@dataclass(frozen=True)
class Swish(Activation):
    name = "swish"

    def value(self, x):
        x = _arr(x)
        return _finish(x * sigmoid(x), x)

    def grad(self, x):
        x = _arr(x)
        return _finish(sigmoid(x) + x * sigmoid_derivative(x), x)

    def second_grad(self, x):
        x = _arr(x)
        ds = sigmoid_derivative(x)
        return _finish(2.0 * ds + (x * ds) * (sigmoid(-x) - sigmoid(x)), x)


@dataclass(frozen=True)
class Mish(Activation):
    name = "mish"

    def value(self, x):
        x = _arr(x)
        return _finish(x * np.tanh(softplus(x)), x)

    def grad(self, x):
        x = _arr(x)
        s = softplus(x)
        return _finish(np.tanh(s) + x * (tanh_derivative(s) * sigmoid(x)), x)

    def second_grad(self, x):
        # sech^2(s) sigma [2 - 2 x tanh(s) sigma + x (1 - sigma)]
        x = _arr(x)
        s = softplus(x)
        sig = sigmoid(x)
        q = tanh_derivative(s) * sig
        xq = q * x
        out = 2.0 * q - 2.0 * xq * (np.tanh(s) * sig) + xq * sigmoid(-x)
        return _finish(out, x)


@dataclass(frozen=True)
class GELU(Activation):
    """Exact form x * Phi(x)."""

    name = "gelu"

    def value(self, x):
        x = _arr(x)
        return _finish(x * normal_cdf(x), x)

    def grad(self, x):
        x = _arr(x)
        return _finish(normal_cdf(x) + x * normal_pdf(x), x)

    def second_grad(self, x):
        x = _arr(x)
        pdf = normal_pdf(x)
        return _finish(2.0 * pdf - (x * pdf) * x, x)


@dataclass(frozen=True)
class ReLU(Activation):
    """Subgradient at 0 is taken as 0."""

    name = "relu"
    kinked = True

    def value(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, x, 0.0), x)

    def grad(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, 1.0, 0.0), x)

    def second_grad(self, x):
        x = _arr(x)
        return _finish(np.zeros_like(x), x)


@dataclass(frozen=True)
class LeakyReLU(Activation):
    slope: float = 0.01
    name = "leaky_relu"
    kinked = True

    def __post_init__(self):
        if not 0.0 < self.slope < 1.0:
            raise ValueError(f"LeakyReLU slope must lie in (0, 1), got {self.slope}")

    def value(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, x, self.slope * x), x)

    def grad(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, 1.0, self.slope), x)

    def second_grad(self, x):
        x = _arr(x)
        return _finish(np.zeros_like(x), x)

    def __str__(self) -> str:
        return f"{self.name}:{self.slope!r}"


@dataclass(frozen=True)
class ELU(Activation):
    alpha: float = 1.0
    name = "elu"
    # second derivative jumps at 0 for every alpha
    kinked = True

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise ValueError(f"ELU alpha must be positive, got {self.alpha}")

    def value(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, x, self.alpha * np.expm1(np.minimum(x, 0.0))), x)

    def grad(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, 1.0, self.alpha * np.exp(np.minimum(x, 0.0))), x)

    def second_grad(self, x):
        x = _arr(x)
        return _finish(np.where(x > 0, 0.0, self.alpha * np.exp(np.minimum(x, 0.0))), x)

    def __str__(self) -> str:
        return f"{self.name}:{self.alpha!r}"


@dataclass(frozen=True)
class SELU(Activation):
    name = "selu"
    kinked = True

    def value(self, x):
        x = _arr(x)
        neg = SELU_ALPHA * np.expm1(np.minimum(x, 0.0))
        return _finish(SELU_SCALE * np.where(x > 0, x, neg), x)

    def grad(self, x):
        x = _arr(x)
        neg = SELU_ALPHA * np.exp(np.minimum(x, 0.0))
        return _finish(SELU_SCALE * np.where(x > 0, 1.0, neg), x)

    def second_grad(self, x):
        x = _arr(x)
        neg = SELU_ALPHA * np.exp(np.minimum(x, 0.0))
        return _finish(SELU_SCALE * np.where(x > 0, 0.0, neg), x)


@dataclass(frozen=True)
class Sigmoid(Activation):
    name = "sigmoid"

    def value(self, x):
        return sigmoid(x)

    def grad(self, x):
        return sigmoid_derivative(x)

    def second_grad(self, x):
        x = _arr(x)
        return _finish(sigmoid_derivative(x) * (sigmoid(-x) - sigmoid(x)), x)


@dataclass(frozen=True)
class Tanh(Activation):
    name = "tanh"

    def value(self, x):
        x = _arr(x)
        return _finish(np.tanh(x), x)

    def grad(self, x):
        return tanh_derivative(x)

    def second_grad(self, x):
        x = _arr(x)
        return _finish(-2.0 * np.tanh(x) * tanh_derivative(x), x)


@dataclass(frozen=True)
class Identity(Activation):
    name = "identity"

    def value(self, x):
        x = _arr(x)
        return _finish(x + 0.0, x)

    def grad(self, x):
        x = _arr(x)
        return _finish(np.ones_like(x), x)

    def second_grad(self, x):
        x = _arr(x)
        return _finish(np.zeros_like(x), x)


_REGISTRY: dict[str, type[Activation]] = {
    cls.name: cls
    for cls in (Serf, Swish, Mish, GELU, ReLU, LeakyReLU, ELU, SELU, Sigmoid, Tanh, Identity)
}
KIND_NAMES = tuple(_REGISTRY)


def get_activation(spec: str | Activation) -> Activation:
    """Parse names like ``"serf"``, ``"leaky_relu:0.1"`` or ``"elu:0.5"``."""
    if isinstance(spec, Activation):
        return spec
    name, _, param = spec.strip().lower().partition(":")
    name = name.replace("-", "_")
    if name not in _REGISTRY:
        raise ValueError(f"unknown activation {spec!r}; valid kinds: {', '.join(KIND_NAMES)}")
    cls = _REGISTRY[name]
    if param:
        if cls not in (LeakyReLU, ELU):
            raise ValueError(f"activation {name!r} takes no parameter")
        return cls(float(param))
    return cls()


def all_kinds() -> list[Activation]:
    return [cls() for cls in _REGISTRY.values()]


def value(kind, x):
    return get_activation(kind).value(x)


def grad(kind, x):
    return get_activation(kind).grad(x)


def second_grad(kind, x):
    return get_activation(kind).second_grad(x)


def batch_value(kind, xs: np.ndarray) -> np.ndarray:
    return np.asarray(get_activation(kind).value(np.asarray(xs, dtype=np.float64)))


def batch_grad(kind, xs: np.ndarray) -> np.ndarray:
    return np.asarray(get_activation(kind).grad(np.asarray(xs, dtype=np.float64)))


def serf_minimum() -> tuple[float, float]:
    """Location and value of serf's global minimum (it lies in (-2, 0))."""
    from serf.reference import golden_section_minimize

    return golden_section_minimize(serf, -3.0, 0.0, tol=1e-10)

