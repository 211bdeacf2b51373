"""Counter-based Philox4x64-10 generator.

Output block ``i`` of a stream is ``philox(counter=(i, 0, 0, 0), key=(seed, stream))``,
so draws are a pure function of (seed, stream, position) on every platform.
The block function reproduces the Random123 known-answer vectors.
"""
from __future__ import annotations

import numpy as np

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_MUL = (np.uint64(0xD2E7470EE14C6C93), np.uint64(0xCA5A826395121157))
_WEYL = (np.uint64(0x9E3779B97F4A7C15), np.uint64(0xBB67AE8584CAA73B))
ROUNDS = 10


def _mulhilo(a: np.uint64, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full 128-bit product of 64-bit words, split into (hi, lo)."""
    a_lo, a_hi = a & _M32, a >> _S32
    b_lo, b_hi = b & _M32, b >> _S32
    ll = a_lo * b_lo
    hl = a_hi * b_lo
    lh = a_lo * b_hi
    hh = a_hi * b_hi
    cross = (ll >> _S32) + (hl & _M32) + (lh & _M32)
    hi = hh + (hl >> _S32) + (lh >> _S32) + (cross >> _S32)
    lo = (cross << _S32) | (ll & _M32)
    return hi, lo


def philox4x64(counters: np.ndarray, key: tuple[int, int]) -> np.ndarray:
    """Apply the block function to an (n, 4) uint64 counter array."""
    c = [np.array(counters[:, i], dtype=np.uint64) for i in range(4)]
    k0, k1 = np.uint64(key[0]), np.uint64(key[1])
    with np.errstate(over="ignore"):
        for r in range(ROUNDS):
            if r:
                k0 = np.uint64((int(k0) + int(_WEYL[0])) & 0xFFFFFFFFFFFFFFFF)
                k1 = np.uint64((int(k1) + int(_WEYL[1])) & 0xFFFFFFFFFFFFFFFF)
            hi0, lo0 = _mulhilo(_MUL[0], c[0])
            hi1, lo1 = _mulhilo(_MUL[1], c[2])
            c = [hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0]
    return np.stack(c, axis=1)


class RngState:
    """A Philox stream. ``position`` counts 4-word blocks already consumed."""

    def __init__(self, seed: int, stream: int = 0, position: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream = int(stream) & 0xFFFFFFFFFFFFFFFF
        self.position = position

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, stream={self.stream}, position={self.position})"

    def spawn(self, stream: int) -> "RngState":
        return RngState(self.seed, stream)

    def random_raw(self, n: int) -> np.ndarray:
        """Next ``n`` 64-bit words; leftover words of the last block are dropped."""
        blocks = -(-n // 4)
        counters = np.zeros((blocks, 4), dtype=np.uint64)
        counters[:, 0] = np.arange(self.position, self.position + blocks, dtype=np.uint64)
        self.position += blocks
        return philox4x64(counters, (self.seed, self.stream)).reshape(-1)[:n]

    def uniform(self, shape=(), low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Doubles in [low, high) from the top 53 bits of each word."""
        n = int(np.prod(shape, dtype=np.int64))
        u = (self.random_raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (low + (high - low) * u).reshape(shape)

    def normal(self, shape=(), mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        # Box-Muller, cosine branch only: one normal per pair of words.
        n = int(np.prod(shape, dtype=np.int64))
        raw = self.random_raw(2 * n)
        u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return (mean + std * z).reshape(shape)

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.random_raw(n), kind="stable")

    def bernoulli_keep(self, shape, keep_prob: float) -> np.ndarray:
        return self.uniform(shape) < keep_prob
