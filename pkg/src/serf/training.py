"""Mini-batch training loop for ``serf.nn.Network``."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from serf.datasets import LabeledDataset, batches
from serf.nn import DROPOUT_STREAM, Network, NetworkSpec, accuracy, softmax_cross_entropy
from serf.optimizers import Optimizer, make_optimizer
from serf.rng import RngState


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer hyperparameters left as None fall back to the optimizer's defaults."""

    optimizer: str = "sgd"
    lr: float = 0.01
    momentum: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    eps: float | None = None
    batch_size: int = 128
    epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")
        self.build_optimizer()  # validates hyperparameters eagerly

    def build_optimizer(self) -> Optimizer:
        extra = {k: getattr(self, k) for k in ("momentum", "beta1", "beta2", "eps")
                 if getattr(self, k) is not None}
        if self.optimizer == "sgd":
            extra = {k: v for k, v in extra.items() if k == "momentum"}
        elif self.optimizer == "adagrad":
            extra = {k: v for k, v in extra.items() if k == "eps"}
        elif self.optimizer == "adam":
            extra.pop("momentum", None)
        return make_optimizer(self.optimizer, self.lr, **extra)


@dataclass
class TrainResult:
    network: Network
    test_accuracy: float
    train_loss: float
    epoch_losses: list[float] = field(default_factory=list)
    diverged: bool = False

    @property
    def loss_digest(self) -> str:
        """Short hash of the per-epoch loss trace, for cheap bitwise comparisons."""
        raw = np.asarray(self.epoch_losses, dtype=np.float64).tobytes()
        return hashlib.sha256(raw).hexdigest()[:16]


def evaluate(net: Network, ds: LabeledDataset, batch_size: int = 4096) -> float:
    correct = 0
    for xb, yb in batches(ds, batch_size):
        logits = net.predict(xb)
        correct += int(np.sum(np.argmax(logits, axis=1) == yb))
    return correct / len(ds) if len(ds) else 0.0


def train(spec: NetworkSpec, train_ds: LabeledDataset, test_ds: LabeledDataset,
          cfg: TrainConfig) -> TrainResult:
    """Train from the initial weights drawn for ``spec``; stops early if the loss goes non-finite."""
    if len(train_ds) == 0:
        raise ValueError("training set is empty")
    if train_ds.dim != spec.input_dim:
        raise ValueError(f"data has {train_ds.dim} features, network expects {spec.input_dim}")
    net = Network.init(spec)
    opt = cfg.build_optimizer()
    dropout_rng = RngState(spec.seed, DROPOUT_STREAM)
    params = net.params()
    losses: list[float] = []
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for epoch in range(cfg.epochs):
            total, count = 0.0, 0
            for xb, yb in batches(train_ds, cfg.batch_size, cfg.seed, epoch):
                logits, cache = net.forward(xb, "train", dropout_rng)
                loss, dlogits = softmax_cross_entropy(logits, yb)
                if not math.isfinite(loss):
                    losses.append(math.nan)
                    return TrainResult(net, 0.0, math.nan, losses, diverged=True)
                opt.step(params, net.backward(cache, dlogits))
                total += loss * len(yb)
                count += len(yb)
            losses.append(total / count)
        acc = evaluate(net, test_ds)
    return TrainResult(net, acc, losses[-1], losses)


__all__ = ["TrainConfig", "TrainResult", "accuracy", "evaluate", "train"]
