"""Feed-forward network with batch norm, dropout and manual backprop.

Each hidden layer computes ``dense -> [batch norm] -> activation -> [dropout]``;
the output layer is a plain dense map producing logits. Tensors are float64
numpy arrays of shape (batch, features).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from serf.activations import Activation, Identity, get_activation
from serf.initializers import Initializer, get_initializer, init_weights
from serf.rng import RngState

Mode = Literal["train", "eval"]

WEIGHT_STREAM = 0
DROPOUT_STREAM = 1


@dataclass(frozen=True)
class LayerSpec:
    width: int
    activation: Activation = field(default_factory=Identity)
    batch_norm: bool = False
    dropout_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "activation", get_activation(self.activation))
        if self.width < 1:
            raise ValueError(f"layer width must be >= 1, got {self.width}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {self.dropout_rate}")


@dataclass(frozen=True)
class NetworkSpec:
    """Hidden layers plus an identity-activated output layer of ``output_dim`` units."""

    input_dim: int
    layers: tuple[LayerSpec, ...]
    output_dim: int
    initializer: Initializer = field(default_factory=Initializer)
    seed: int = 0
    bn_momentum: float = 0.1
    bn_epsilon: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "initializer", get_initializer(self.initializer))
        if not self.layers:
            raise ValueError("a network needs at least one hidden layer")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError(f"bad dims: input {self.input_dim}, output {self.output_dim}")
        if not self.bn_epsilon > 0:
            raise ValueError("batch-norm epsilon must be positive")


def mlp_spec(input_dim: int, output_dim: int, hidden: list[int], activation="serf", *,
             batch_norm: bool = False, dropout: float = 0.0,
             initializer="glorot_uniform", seed: int = 0) -> NetworkSpec:
    layers = tuple(LayerSpec(w, get_activation(activation), batch_norm, dropout) for w in hidden)
    return NetworkSpec(input_dim, layers, output_dim, get_initializer(initializer), seed)


@dataclass
class BatchNormState:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1
    epsilon: float = 1e-5

    @classmethod
    def fresh(cls, width: int, momentum: float, epsilon: float) -> "BatchNormState":
        return cls(np.ones(width), np.zeros(width), np.zeros(width), np.ones(width),
                   momentum, epsilon)


@dataclass
class Layer:
    weight: np.ndarray
    bias: np.ndarray
    activation: Activation
    bn: BatchNormState | None = None
    dropout_rate: float = 0.0


@dataclass
class ForwardCache:
    mode: Mode
    inputs: list[np.ndarray]
    pre: list[np.ndarray]
    xhat: list[np.ndarray | None]
    inv_std: list[np.ndarray | None]
    masks: list[np.ndarray | None]
    last_hidden: np.ndarray


class Network:
    """Parameters and running statistics of an MLP built from a ``NetworkSpec``."""

    def __init__(self, spec: NetworkSpec, layers: list[Layer], out_weight: np.ndarray,
                 out_bias: np.ndarray):
        self.spec = spec
        self.layers = layers
        self.out_weight = out_weight
        self.out_bias = out_bias

    @classmethod
    def init(cls, spec: NetworkSpec) -> "Network":
        # Weights are drawn layer by layer without looking at the activation,
        # so specs differing only in activation share identical weights.
        rng = RngState(spec.seed, WEIGHT_STREAM)
        layers = []
        fan_in = spec.input_dim
        for ls in spec.layers:
            w = init_weights(spec.initializer, fan_in, ls.width, rng)
            bn = BatchNormState.fresh(ls.width, spec.bn_momentum, spec.bn_epsilon) if ls.batch_norm else None
            layers.append(Layer(w, np.zeros(ls.width), ls.activation, bn, ls.dropout_rate))
            fan_in = ls.width
        w_out = init_weights(spec.initializer, fan_in, spec.output_dim, rng)
        return cls(spec, layers, w_out, np.zeros(spec.output_dim))

    def params(self) -> list[np.ndarray]:
        """Trainable arrays in a fixed order; ``backward`` returns grads in the same order."""
        out = []
        for layer in self.layers:
            out += [layer.weight, layer.bias]
            if layer.bn is not None:
                out += [layer.bn.gamma, layer.bn.beta]
        return out + [self.out_weight, self.out_bias]

    def param_names(self) -> list[str]:
        names = []
        for i, layer in enumerate(self.layers):
            names += [f"layer{i}.weight", f"layer{i}.bias"]
            if layer.bn is not None:
                names += [f"layer{i}.gamma", f"layer{i}.beta"]
        return names + ["out.weight", "out.bias"]

    def forward(self, x: np.ndarray, mode: Mode = "eval",
                rng: RngState | None = None) -> tuple[np.ndarray, ForwardCache]:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.spec.input_dim:
            raise ValueError(
                f"input has shape {x.shape}, network expects (batch, {self.spec.input_dim})"
            )
        if mode not in ("train", "eval"):
            raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
        cache = ForwardCache(mode, [], [], [], [], [], x)
        a = x
        for layer in self.layers:
            cache.inputs.append(a)
            z = a @ layer.weight + layer.bias
            xhat = inv = None
            if layer.bn is not None:
                z, xhat, inv = _bn_forward(layer.bn, z, mode == "train")
            cache.pre.append(z)
            cache.xhat.append(xhat)
            cache.inv_std.append(inv)
            a = layer.activation.value(z)
            mask = None
            if mode == "train" and layer.dropout_rate > 0.0:
                if rng is None:
                    raise ValueError("train-mode dropout needs an RngState")
                keep = 1.0 - layer.dropout_rate
                mask = rng.bernoulli_keep(a.shape, keep) / keep
                a = a * mask
            cache.masks.append(mask)
        cache.last_hidden = a
        return a @ self.out_weight + self.out_bias, cache

    def backward(self, cache: ForwardCache, dlogits: np.ndarray) -> list[np.ndarray]:
        """Gradients of the loss w.r.t. ``params()`` given dL/dlogits."""
        dlogits = np.asarray(dlogits, dtype=np.float64)
        grads_rev = [dlogits.sum(axis=0), cache.last_hidden.T @ dlogits]
        da = dlogits @ self.out_weight.T
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            if cache.masks[i] is not None:
                da = da * cache.masks[i]
            dz = da * layer.activation.grad(cache.pre[i])
            if layer.bn is not None:
                xhat, inv = cache.xhat[i], cache.inv_std[i]
                grads_rev += [dz.sum(axis=0), (dz * xhat).sum(axis=0)]
                dxhat = dz * layer.bn.gamma
                if cache.mode == "train":
                    n = dz.shape[0]
                    dz = inv / n * (n * dxhat - dxhat.sum(axis=0)
                                    - xhat * (dxhat * xhat).sum(axis=0))
                else:
                    dz = dxhat * inv
            grads_rev += [dz.sum(axis=0), cache.inputs[i].T @ dz]
            da = dz @ layer.weight.T
        return grads_rev[::-1]

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x, "eval")[0]


def _bn_forward(bn: BatchNormState, z: np.ndarray, training: bool):
    if training:
        mean = z.mean(axis=0)
        var = z.var(axis=0)
        # running statistics keep the biased batch variance
        bn.running_mean *= 1.0 - bn.momentum
        bn.running_mean += bn.momentum * mean
        bn.running_var *= 1.0 - bn.momentum
        bn.running_var += bn.momentum * var
    else:
        mean, var = bn.running_mean, bn.running_var
    inv = 1.0 / np.sqrt(var + bn.epsilon)
    xhat = (z - mean) * inv
    return bn.gamma * xhat + bn.beta, xhat, inv


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood and its gradient w.r.t. the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    n, classes = logits.shape
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    if n and (labels.min() < 0 or labels.max() >= classes):
        raise ValueError(f"labels must lie in [0, {classes})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_p = shifted - log_z
    rows = np.arange(n)
    loss = -log_p[rows, labels].mean()
    dlogits = np.exp(log_p)
    dlogits[rows, labels] -= 1.0
    return float(loss), dlogits / n


def accuracy(logits: np.ndarray, labels: np.ndarray) -> float:
    if len(labels) == 0:
        return 0.0
    return float(np.mean(np.argmax(logits, axis=1) == labels))
