"""SGD, Adam and Adagrad acting in place on lists of numpy arrays."""
from __future__ import annotations

import numpy as np


class Optimizer:
    name = "base"

    def __init__(self, lr: float):
        if not lr > 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        self.lr = lr
        self.t = 0
        self._state: list[dict[str, np.ndarray]] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Update every array in ``params`` in place; state advances once per call."""
        if len(params) != len(grads):
            raise ValueError(f"{len(params)} params but {len(grads)} grads")
        for i, (p, g) in enumerate(zip(params, grads)):
            if p.shape != g.shape:
                raise ValueError(f"param {i} has shape {p.shape}, grad has {g.shape}")
        if self._state is None:
            self._state = [self._init_state(p) for p in params]
        self.t += 1
        for p, g, st in zip(params, grads, self._state):
            self._update(p, g, st)

    def _init_state(self, p: np.ndarray) -> dict[str, np.ndarray]:
        return {}

    def _update(self, p, g, st) -> None:
        raise NotImplementedError


class SGD(Optimizer):
    name = "sgd"

    def __init__(self, lr: float = 0.01, momentum: float = 0.0):
        super().__init__(lr)
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"momentum must lie in [0, 1), got {momentum}")
        self.momentum = momentum

    def _init_state(self, p):
        return {"v": np.zeros_like(p)}

    def _update(self, p, g, st):
        v = st["v"]
        v *= self.momentum
        v -= self.lr * g
        p += v


class Adam(Optimizer):
    name = "adam"

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        super().__init__(lr)
        if not (0.0 < beta1 < 1.0 and 0.0 < beta2 < 1.0):
            raise ValueError(f"betas must lie in (0, 1), got ({beta1}, {beta2})")
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {eps}")
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def _init_state(self, p):
        return {"m": np.zeros_like(p), "v": np.zeros_like(p)}

    def _update(self, p, g, st):
        m, v = st["m"], st["v"]
        m *= self.beta1
        m += (1.0 - self.beta1) * g
        v *= self.beta2
        v += (1.0 - self.beta2) * g * g
        m_hat = m / (1.0 - self.beta1**self.t)
        v_hat = v / (1.0 - self.beta2**self.t)
        p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class Adagrad(Optimizer):
    name = "adagrad"

    def __init__(self, lr: float = 0.01, eps: float = 1e-10):
        super().__init__(lr)
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {eps}")
        self.eps = eps

    def _init_state(self, p):
        return {"acc": np.zeros_like(p)}

    def _update(self, p, g, st):
        acc = st["acc"]
        acc += g * g
        p -= self.lr * g / (np.sqrt(acc) + self.eps)


OPTIMIZERS = {cls.name: cls for cls in (SGD, Adam, Adagrad)}


def make_optimizer(name: str, lr: float, **kwargs) -> Optimizer:
    try:
        cls = OPTIMIZERS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown optimizer {name!r}; valid: {', '.join(OPTIMIZERS)}") from None
    return cls(lr, **kwargs)
