"""Finite-difference checks for activations and whole networks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from serf.activations import Activation, get_activation
from serf.nn import Network, NetworkSpec, mlp_spec, softmax_cross_entropy
from serf.reference import richardson_derivative
from serf.rng import RngState

KINK_EXCLUSION = 1e-3


@dataclass(frozen=True)
class ActivationCheck:
    kind: str
    samples: int
    worst_x: float
    worst_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_error < self.tol


def log_uniform_samples(n: int, lo: float = 1e-6, hi: float = 30.0, seed: int = 0) -> np.ndarray:
    """``n`` points with |x| log-uniform on [lo, hi] and random sign."""
    rng = RngState(seed, stream=11)
    mag = np.exp(rng.uniform((n,), np.log(lo), np.log(hi)))
    sign = np.where(rng.uniform((n,)) < 0.5, -1.0, 1.0)
    return sign * mag


def check_activation(kind, samples: int = 10_000, tol: float = 1e-6, seed: int = 0,
                     exclude_kinks: bool = True) -> ActivationCheck:
    """Compare grad(x) with a Richardson central difference of value(x).

    The error is scaled by max(1, |grad|). Kinked kinds skip |x| <= 1e-3
    unless ``exclude_kinks`` is False.
    """
    act: Activation = get_activation(kind)
    xs = log_uniform_samples(samples, seed=seed)
    if exclude_kinks and act.kinked:
        xs = xs[np.abs(xs) > KINK_EXCLUSION]
    g = np.asarray(act.grad(xs))
    h = 1e-5 * np.maximum(1.0, np.abs(xs))
    fd = richardson_derivative(act.value, xs, h)
    err = np.abs(g - fd) / np.maximum(1.0, np.abs(g))
    i = int(np.argmax(err))
    return ActivationCheck(str(act), len(xs), float(xs[i]), float(err[i]), tol)


@dataclass(frozen=True)
class NetworkCheck:
    kind: str
    batch_norm: bool
    n_params: int
    worst_param: str
    worst_ratio: float  # |fd - bp| / allowed; passes below 1

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1.0


def random_small_spec(kind, batch_norm: bool, seed: int) -> NetworkSpec:
    """At most 3 hidden layers of at most 8 units, dropout off."""
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, 4))
    hidden = [int(w) for w in rng.integers(2, 9, size=depth)]
    return mlp_spec(int(rng.integers(2, 6)), int(rng.integers(2, 5)), hidden, kind,
                    batch_norm=batch_norm, seed=seed)


def check_network(spec: NetworkSpec, batch: int = 6, seed: int = 0, h: float = 1e-6,
                  rel_tol: float = 1e-4, abs_tol: float = 1e-6) -> NetworkCheck:
    """Backprop vs central differences of the train-mode loss, every parameter.

    Biases, gamma and beta are jittered first so none sits at its trivial
    initial value.
    """
    rng = np.random.default_rng(seed + 1)
    net = Network.init(spec)
    for p in net.params():
        p += 0.1 * rng.normal(size=p.shape)
    x = rng.normal(size=(batch, spec.input_dim))
    y = rng.integers(0, spec.output_dim, size=batch)

    def loss() -> float:
        return softmax_cross_entropy(net.forward(x, "train")[0], y)[0]

    logits, cache = net.forward(x, "train")
    grads = net.backward(cache, softmax_cross_entropy(logits, y)[1])
    worst, worst_name, count = 0.0, "", 0
    for name, p, g in zip(net.param_names(), net.params(), grads):
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + h
            up = loss()
            p[idx] = orig - h
            down = loss()
            p[idx] = orig
            fd = (up - down) / (2 * h)
            allowed = max(rel_tol * max(abs(fd), abs(g[idx])), abs_tol)
            ratio = abs(fd - g[idx]) / allowed
            count += 1
            if ratio > worst:
                worst, worst_name = ratio, f"{name}{list(idx)}"
    return NetworkCheck(str(spec.layers[0].activation), spec.layers[0].batch_norm, count,
                        worst_name, worst)
