"""IDX (MNIST) parsing and writing, synthetic blobs, deterministic batching."""
from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from serf.rng import RngState

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
DATA_DIR_ENV = "SERF_DATA_DIR"
SHUFFLE_STREAM = 1 << 32

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


class IdxError(ValueError):
    """Malformed IDX content."""


@dataclass(frozen=True)
class LabeledDataset:
    images: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.images.ndim != 2 or self.images.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"{self.images.shape[0]} images but {self.labels.shape[0]} labels"
            )

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def dim(self) -> int:
        return self.images.shape[1]

    def standardized(self, mean: np.ndarray | None = None, std: np.ndarray | None = None):
        """Per-feature standardisation; pass train statistics when transforming test data."""
        mean = self.images.mean(axis=0) if mean is None else mean
        std = self.images.std(axis=0) if std is None else std
        safe = np.where(std > 0, std, 1.0)
        return LabeledDataset((self.images - mean) / safe, self.labels, self.name)


def _header(data: bytes, n_ints: int, what: str) -> tuple[int, ...]:
    need = 4 * n_ints
    if len(data) < need:
        raise IdxError(f"{what}: header needs {need} bytes, got {len(data)}")
    return struct.unpack(f">{n_ints}I", data[:need])


def parse_idx_images(data: bytes) -> np.ndarray:
    """(count, rows*cols) float64 array of pixels scaled to [0, 1]."""
    magic, count, rows, cols = _header(data, 4, "image file")
    if magic != IMAGE_MAGIC:
        raise IdxError(f"image file: expected magic 0x{IMAGE_MAGIC:08x}, got 0x{magic:08x}")
    expected = count * rows * cols
    payload = data[16:]
    if len(payload) != expected:
        raise IdxError(
            f"image file: payload has {len(payload)} bytes, header implies {expected}"
            f" ({count} x {rows} x {cols})"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    return pixels.reshape(count, rows * cols) / 255.0


def parse_idx_labels(data: bytes, classes: int = 10) -> np.ndarray:
    magic, count = _header(data, 2, "label file")
    if magic != LABEL_MAGIC:
        raise IdxError(f"label file: expected magic 0x{LABEL_MAGIC:08x}, got 0x{magic:08x}")
    payload = data[8:]
    if len(payload) != count:
        raise IdxError(f"label file: payload has {len(payload)} bytes, header implies {count}")
    labels = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)
    bad = np.flatnonzero(labels >= classes)
    if bad.size:
        i = int(bad[0])
        raise IdxError(f"label file: label {labels[i]} at index {i} outside [0, {classes})")
    return labels


def write_idx_images(images: np.ndarray, rows: int | None = None, cols: int | None = None) -> bytes:
    """Inverse of ``parse_idx_images`` for pixels on the k/255 lattice."""
    n, dim = images.shape
    if rows is None or cols is None:
        side = int(round(dim**0.5))
        rows, cols = (side, side) if side * side == dim else (1, dim)
    if rows * cols != dim:
        raise ValueError(f"rows*cols = {rows * cols} does not match feature dim {dim}")
    if images.size and (images.min() < 0.0 or images.max() > 1.0):
        raise ValueError("pixels must lie in [0, 1]")
    raw = np.rint(images * 255.0).astype(np.uint8)
    return struct.pack(">4I", IMAGE_MAGIC, n, rows, cols) + raw.tobytes()


def write_idx_labels(labels: np.ndarray) -> bytes:
    labels = np.asarray(labels)
    return struct.pack(">2I", LABEL_MAGIC, labels.shape[0]) + labels.astype(np.uint8).tobytes()


def _read_maybe_gz(path: Path) -> bytes:
    for candidate in (path, path.with_name(path.name + ".gz")):
        if candidate.exists():
            raw = candidate.read_bytes()
            return gzip.decompress(raw) if candidate.suffix == ".gz" else raw
    raise FileNotFoundError(f"no such file: {path} (or {path.name}.gz)")


def mnist_dir(path: str | Path | None = None) -> Path | None:
    """Explicit path, else $SERF_DATA_DIR, else None."""
    if path:
        return Path(path)
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else None


def mnist_available(path: str | Path | None = None) -> bool:
    d = mnist_dir(path)
    if d is None:
        return False
    return all((d / f).exists() or (d / (f + ".gz")).exists()
               for pair in MNIST_FILES.values() for f in pair)


def load_mnist(split: str, path: str | Path | None = None) -> LabeledDataset:
    d = mnist_dir(path)
    if d is None:
        raise FileNotFoundError(f"no MNIST directory given and ${DATA_DIR_ENV} is unset")
    img_name, lbl_name = MNIST_FILES[split]
    images = parse_idx_images(_read_maybe_gz(d / img_name))
    labels = parse_idx_labels(_read_maybe_gz(d / lbl_name))
    return LabeledDataset(images, labels, f"mnist-{split}")


def synthetic_blobs(classes: int, per_class: int, dim: int, seed: int,
                    base: float = 0.3, contrast: float = 0.2,
                    separation: float = 8.0) -> LabeledDataset:
    """Gaussian clusters with pixel-like features in [0, 1].

    When ``dim >= classes`` the features are cut into ``classes`` equal blocks
    and class k is centred at ``base`` everywhere except ``base + contrast`` on
    block k, so the centres are equidistant (a regular simplex). Otherwise the
    centres sit evenly on a circle in the first two features. The isotropic
    noise std is the distance between neighbouring centres divided by
    ``separation``. Samples are clipped to [0, 1] and ordered by class.
    """
    if classes < 2:
        raise ValueError(f"need at least 2 classes, got {classes}")
    if dim < 2 and classes > 2:
        raise ValueError("dim must be >= 2 for more than 2 classes")
    centres = np.full((classes, dim), base)
    if dim >= classes:
        block = dim // classes
        for k in range(classes):
            centres[k, k * block:(k + 1) * block] += contrast
        gap = contrast * np.sqrt(2.0 * block)
    else:
        radius = 0.35
        theta = 2.0 * np.pi * np.arange(classes) / classes
        centres[:, 0] = 0.5 + radius * np.cos(theta)
        centres[:, 1] = 0.5 + radius * np.sin(theta)
        gap = 2.0 * radius * np.sin(np.pi / classes)
    rng = RngState(seed, stream=7)
    labels = np.repeat(np.arange(classes), per_class)
    noise = rng.normal((classes * per_class, dim), 0.0, gap / separation)
    images = np.clip(centres[labels] + noise, 0.0, 1.0)
    return LabeledDataset(images, labels.astype(np.int64), f"blobs-{classes}x{per_class}-s{seed}")


def batches(ds: LabeledDataset, batch_size: int, shuffle_seed: int | None = None,
            epoch: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Mini-batches in a permutation fixed by (shuffle_seed, epoch); the last may be short."""
    if batch_size < 1:
        raise ValueError(f"batch size must be >= 1, got {batch_size}")
    n = len(ds)
    if shuffle_seed is None:
        order = np.arange(n)
    else:
        order = RngState(shuffle_seed, SHUFFLE_STREAM + epoch).permutation(n)
    return [(ds.images[idx], ds.labels[idx])
            for idx in (order[i:i + batch_size] for i in range(0, n, batch_size))]
