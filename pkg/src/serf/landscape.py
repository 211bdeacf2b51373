"""Output landscapes: a randomly initialised 2-in/1-out network evaluated on a grid."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from serf.nn import Network, NetworkSpec, mlp_spec

DEFAULT_SEED = 0
DEFAULT_LAYERS = 6
DEFAULT_WIDTH = 16
DEFAULT_INITIALIZER = "glorot_normal"


@dataclass(frozen=True)
class GridSpec:
    xmin: float = -10.0
    xmax: float = 10.0
    ymin: float = -10.0
    ymax: float = 10.0
    res: int = 256

    def __post_init__(self):
        if self.res < 2:
            raise ValueError(f"grid resolution must be >= 2, got {self.res}")
        if not (np.isfinite([self.xmin, self.xmax, self.ymin, self.ymax]).all()
                and self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("grid bounds must be finite with min < max")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.xmin, self.xmax, self.res),
                np.linspace(self.ymin, self.ymax, self.res))


def landscape_spec(activation, layers: int = DEFAULT_LAYERS, width: int = DEFAULT_WIDTH,
                   seed: int = DEFAULT_SEED, initializer: str = DEFAULT_INITIALIZER) -> NetworkSpec:
    return mlp_spec(2, 1, [width] * layers, activation, initializer=initializer, seed=seed)


def render(spec: NetworkSpec, grid: GridSpec = GridSpec()) -> np.ndarray:
    """Field of shape (res, res); ``field[i, j]`` is the output at (x_j, y_i)."""
    if spec.input_dim != 2 or spec.output_dim != 1:
        raise ValueError(
            f"landscape needs a 2-input, 1-output network, got {spec.input_dim} -> {spec.output_dim}"
        )
    xs, ys = grid.axes()
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])
    out = Network.init(spec).predict(points)
    return out.reshape(grid.res, grid.res)


def mean_abs_laplacian(field: np.ndarray, grid: GridSpec) -> float | None:
    """Mean |five-point Laplacian| over interior points, or None below 3x3."""
    if min(field.shape) < 3:
        return None
    hx = (grid.xmax - grid.xmin) / (grid.res - 1)
    hy = (grid.ymax - grid.ymin) / (grid.res - 1)
    c = field[1:-1, 1:-1]
    lap = ((field[1:-1, 2:] - 2 * c + field[1:-1, :-2]) / hx**2
           + (field[2:, 1:-1] - 2 * c + field[:-2, 1:-1]) / hy**2)
    return float(np.mean(np.abs(lap)))


def write_pgm(field: np.ndarray, path: str | Path) -> None:
    """16-bit binary PGM (P5), min-max scaled to 0..65535; a flat field maps to 0."""
    lo, hi = float(field.min()), float(field.max())
    scaled = (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)
    pixels = np.rint(scaled * 65535.0).astype(">u2")
    rows, cols = field.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    cols, rows, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype, count=rows * cols).reshape(rows, cols)


def write_field_csv(field: np.ndarray, grid: GridSpec, path: str | Path) -> None:
    xs, ys = grid.axes()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                w.writerow([repr(float(x)), repr(float(y)), repr(float(field[i, j]))])
