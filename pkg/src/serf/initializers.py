"""Weight initializers drawing from a seeded ``RngState``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from serf.rng import RngState

_NAMES = (
    "glorot_uniform", "glorot_normal", "he_uniform", "he_normal", "lecun_normal",
    "random_uniform", "random_normal",
)


@dataclass(frozen=True)
class Initializer:
    """``low``/``high`` parametrise random_uniform, ``mean``/``std`` random_normal."""

    name: str = "glorot_uniform"
    low: float = -0.05
    high: float = 0.05
    mean: float = 0.0
    std: float = 0.05

    def __post_init__(self):
        if self.name not in _NAMES:
            raise ValueError(f"unknown initializer {self.name!r}; valid: {', '.join(_NAMES)}")
        if not self.low < self.high:
            raise ValueError(f"random_uniform needs low < high, got {self.low}, {self.high}")
        if not self.std > 0:
            raise ValueError(f"random_normal needs std > 0, got {self.std}")

    def target_variance(self, fan_in: int, fan_out: int) -> float:
        if self.name.startswith("glorot"):
            return 2.0 / (fan_in + fan_out)
        if self.name.startswith("he"):
            return 2.0 / fan_in
        if self.name == "lecun_normal":
            return 1.0 / fan_in
        if self.name == "random_uniform":
            return (self.high - self.low) ** 2 / 12.0
        return self.std**2

    def __str__(self) -> str:
        if self.name == "random_uniform":
            return f"random_uniform:{self.low!r}:{self.high!r}"
        if self.name == "random_normal":
            return f"random_normal:{self.mean!r}:{self.std!r}"
        return self.name


def get_initializer(spec: str | Initializer) -> Initializer:
    """Parse ``"he_normal"``, ``"random_uniform:-0.1:0.1"``, ``"random_normal:0:0.02"``."""
    if isinstance(spec, Initializer):
        return spec
    name, *params = spec.strip().lower().split(":")
    if not params:
        return Initializer(name)
    vals = [float(p) for p in params]
    if name == "random_uniform" and len(vals) == 2:
        return Initializer(name, low=vals[0], high=vals[1])
    if name == "random_normal" and len(vals) == 2:
        return Initializer(name, mean=vals[0], std=vals[1])
    raise ValueError(f"bad initializer spec {spec!r}")


def init_weights(kind: str | Initializer, fan_in: int, fan_out: int, rng: RngState) -> np.ndarray:
    """A (fan_in, fan_out) weight matrix.

    Uniform variants use the bound sqrt(3 * variance) so that both shapes of a
    family share the same variance.
    """
    init = get_initializer(kind)
    if fan_in < 1 or fan_out < 1:
        raise ValueError(f"fans must be >= 1, got ({fan_in}, {fan_out})")
    shape = (fan_in, fan_out)
    if init.name == "random_uniform":
        return rng.uniform(shape, init.low, init.high)
    if init.name == "random_normal":
        return rng.normal(shape, init.mean, init.std)
    var = init.target_variance(fan_in, fan_out)
    if init.name.endswith("uniform"):
        limit = math.sqrt(3.0 * var)
        return rng.uniform(shape, -limit, limit)
    return rng.normal(shape, 0.0, math.sqrt(var))
