"""One-axis-at-a-time ablation sweeps over activations and seeds.

A sweep takes a base ``RunConfig``, overrides one field per axis value, and
trains every (value, activation, seed) cell. Records are appended to a CSV
as each cell finishes, so an interrupted sweep keeps its completed cells.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable

import numpy as np

from serf.activations import get_activation
from serf.datasets import LabeledDataset, load_mnist, mnist_available, synthetic_blobs
from serf.initializers import get_initializer
from serf.nn import LayerSpec, NetworkSpec
from serf.training import TrainConfig, train

SCHEMA_LINE = "# serf-ablation-records schema=1"
RECORD_COLUMNS = (
    "axis", "axis_value", "activation", "seed", "status", "test_accuracy",
    "train_loss", "epochs", "wall_time", "loss_digest",
)

DEFAULT_ACTIVATIONS = ("swish", "mish", "serf")
DEFAULT_AXIS_VALUES = {
    "dense_units": [32, 64, 128, 256, 512],
    "dropout_rates": [0.0, 0.25, 0.5, 0.75],
    "initializers": ["glorot_uniform", "glorot_normal", "he_uniform", "he_normal",
                     "lecun_normal", "random_uniform", "random_normal"],
    "learning_rates": [1e-4, 1e-3, 1e-2, 1e-1],
    "optimizers": ["sgd", "adam", "adagrad"],
    "num_layers": [1, 2, 4, 8, 16, 32],
    "batch_sizes": [32, 64, 128, 256, 1024],
}


@dataclass(frozen=True)
class ArchConfig:
    """Hidden stack: ``num_layers`` x (dense(hidden_units) -> BN -> activation -> dropout)."""

    hidden_units: int = 128
    num_layers: int = 1
    batch_norm: bool = True
    dropout: float = 0.0
    initializer: str = "glorot_uniform"

    def network_spec(self, input_dim: int, output_dim: int, activation, seed: int) -> NetworkSpec:
        layer = LayerSpec(self.hidden_units, get_activation(activation), self.batch_norm, self.dropout)
        return NetworkSpec(input_dim, (layer,) * self.num_layers, output_dim,
                           get_initializer(self.initializer), seed)


@dataclass(frozen=True)
class DataConfig:
    """``name`` is "mnist", "blobs" or "auto" (MNIST when its files are found)."""

    name: str = "auto"
    path: str | None = None
    classes: int = 10
    dim: int = 784
    train_per_class: int = 300
    test_per_class: int = 100
    train_limit: int | None = None
    standardize: bool = False

    def resolved_name(self) -> str:
        if self.name == "auto":
            return "mnist" if mnist_available(self.path) else "blobs"
        return self.name


@dataclass(frozen=True)
class RunConfig:
    arch: ArchConfig = field(default_factory=ArchConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    data: DataConfig = field(default_factory=DataConfig)
    activations: tuple[str, ...] = DEFAULT_ACTIVATIONS
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.activations or not self.seeds:
            raise ValueError("need at least one activation and one seed")
        for a in self.activations:
            get_activation(a)


def _set_arch(name):
    return lambda cfg, v: replace(cfg, arch=replace(cfg.arch, **{name: v}))


def _set_train(name):
    return lambda cfg, v: replace(cfg, train=replace(cfg.train, **{name: v}))


AXES: dict[str, tuple[Callable[[str], object], Callable[[RunConfig, object], RunConfig]]] = {
    "dense_units": (int, _set_arch("hidden_units")),
    "dropout_rates": (float, _set_arch("dropout")),
    "initializers": (lambda s: str(get_initializer(s)), _set_arch("initializer")),
    "learning_rates": (float, _set_train("lr")),
    "optimizers": (str, _set_train("optimizer")),
    "num_layers": (int, _set_arch("num_layers")),
    "batch_sizes": (int, _set_train("batch_size")),
}


@dataclass(frozen=True)
class AblationAxis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"unknown axis {self.name!r}; valid: {', '.join(AXES)}")
        if not self.values:
            raise ValueError(f"axis {self.name!r} has no values")
        parse = AXES[self.name][0]
        object.__setattr__(self, "values", tuple(parse(v) if isinstance(v, str) else v
                                                 for v in self.values))

    def apply(self, cfg: RunConfig, value) -> RunConfig:
        return AXES[self.name][1](cfg, value)


@dataclass(frozen=True)
class MetricsRecord:
    axis: str
    axis_value: str
    activation: str
    seed: int
    status: str
    test_accuracy: float
    train_loss: float
    epochs: int
    wall_time: float
    loss_digest: str

    def same_result(self, other: "MetricsRecord") -> bool:
        """Equality ignoring wall time."""
        a, b = asdict(self), asdict(other)
        a.pop("wall_time"), b.pop("wall_time")
        return all(a[k] == b[k] or (isinstance(a[k], float) and math.isnan(a[k])
                                    and math.isnan(b[k])) for k in a)


# --- records CSV -------------------------------------------------------------


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _record_row(r: MetricsRecord) -> list[str]:
    return [_fmt(getattr(r, c)) for c in RECORD_COLUMNS]


def records_header() -> str:
    return SCHEMA_LINE + "\n" + ",".join(RECORD_COLUMNS) + "\n"


def format_records(records: list[MetricsRecord]) -> str:
    buf = io.StringIO()
    buf.write(records_header())
    w = csv.writer(buf, lineterminator="\n")
    for r in records:
        w.writerow(_record_row(r))
    return buf.getvalue()


def parse_records(text: str) -> list[MetricsRecord]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise ValueError(f"records file must start with {SCHEMA_LINE!r}")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header is None or tuple(header) != RECORD_COLUMNS:
        raise ValueError(f"records header must be {','.join(RECORD_COLUMNS)}")
    types = {f.name: f.type for f in fields(MetricsRecord)}
    casts = {"int": int, "float": float, "str": str}
    out = []
    for lineno, row in enumerate(reader, start=3):
        if not row:
            continue
        if len(row) != len(RECORD_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(RECORD_COLUMNS)} fields, got {len(row)}")
        out.append(MetricsRecord(**{c: casts[types[c]](v) for c, v in zip(RECORD_COLUMNS, row)}))
    return out


def read_records(path: str | Path) -> list[MetricsRecord]:
    return parse_records(Path(path).read_text())


class RecordSink:
    """Single writer appending records with a flush and fsync per row."""

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(records_header())

    def append(self, record: MetricsRecord) -> None:
        if self.path is None:
            return
        with self._lock, open(self.path, "a", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(_record_row(record))
            fh.flush()
            os.fsync(fh.fileno())


# --- running -------------------------------------------------------------------


_DATA_CACHE: dict[DataConfig, tuple[LabeledDataset, LabeledDataset]] = {}
_DATA_LOCK = threading.Lock()


def load_data(cfg: DataConfig) -> tuple[LabeledDataset, LabeledDataset]:
    """(train, test) pair; cached because datasets are immutable."""
    with _DATA_LOCK:
        if cfg not in _DATA_CACHE:
            name = cfg.resolved_name()
            if name == "mnist":
                tr, te = load_mnist("train", cfg.path), load_mnist("test", cfg.path)
            elif name == "blobs":
                tr = synthetic_blobs(cfg.classes, cfg.train_per_class, cfg.dim, seed=1000)
                te = synthetic_blobs(cfg.classes, cfg.test_per_class, cfg.dim, seed=2000)
            else:
                raise ValueError(f"unknown dataset {cfg.name!r}; use mnist, blobs or auto")
            if cfg.train_limit is not None:
                tr = LabeledDataset(tr.images[:cfg.train_limit], tr.labels[:cfg.train_limit], tr.name)
            if cfg.standardize:
                mean, std = tr.images.mean(axis=0), tr.images.std(axis=0)
                tr, te = tr.standardized(mean, std), te.standardized(mean, std)
            _DATA_CACHE[cfg] = (tr, te)
        return _DATA_CACHE[cfg]


def run_cell(cfg: RunConfig, activation: str, seed: int, axis: str = "",
             axis_value: str = "") -> MetricsRecord:
    train_ds, test_ds = load_data(cfg.data)
    classes = int(max(train_ds.labels.max(), test_ds.labels.max())) + 1
    spec = cfg.arch.network_spec(train_ds.dim, classes, activation, seed)
    tcfg = replace(cfg.train, seed=seed)
    start = time.perf_counter()
    result = train(spec, train_ds, test_ds, tcfg)
    elapsed = time.perf_counter() - start
    return MetricsRecord(
        axis=axis, axis_value=axis_value, activation=str(get_activation(activation)), seed=seed,
        status="diverged" if result.diverged else "ok",
        test_accuracy=result.test_accuracy, train_loss=result.train_loss,
        epochs=len(result.epoch_losses), wall_time=elapsed, loss_digest=result.loss_digest,
    )


def sweep_cells(axis: AblationAxis, base: RunConfig) -> list[tuple[object, str, int]]:
    return [(v, a, s) for v in axis.values for a in base.activations for s in base.seeds]


def run_ablation(axis: AblationAxis, base: RunConfig, out_path: str | Path | None = None,
                 workers: int = 1, progress: Callable[[MetricsRecord], None] | None = None
                 ) -> list[MetricsRecord]:
    """Train every (axis value, activation, seed) cell; returns records in cell order.

    Records reach ``out_path`` in completion order, which equals cell order
    when ``workers == 1``.
    """
    sink = RecordSink(out_path)
    cells = sweep_cells(axis, base)
    for v, _, _ in cells:  # reject bad axis values before any training starts
        axis.apply(base, v)

    def job(cell):
        value, act, seed = cell
        rec = run_cell(axis.apply(base, value), act, seed, axis.name, _fmt(value))
        sink.append(rec)
        if progress is not None:
            progress(rec)
        return rec

    if workers <= 1:
        return [job(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, cells))


# --- summaries -----------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    axis_value: str
    activation: str
    runs: int
    mean_accuracy: float
    std_accuracy: float
    diverged: int


def summarize(records: list[MetricsRecord]) -> list[SummaryRow]:
    """Mean and population std of accuracy per (axis value, activation).

    Diverged runs are left out of the statistics and counted separately.
    Rows keep first-appearance order.
    """
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple[str, str], list[MetricsRecord]] = {}
    for r in records:
        groups.setdefault((r.axis_value, r.activation), []).append(r)
    rows = []
    for (value, act), rs in groups.items():
        accs = np.array([r.test_accuracy for r in rs if r.status == "ok"])
        mean = float(accs.mean()) if accs.size else math.nan
        std = float(accs.std()) if accs.size else math.nan
        rows.append(SummaryRow(value, act, len(rs), mean, std, len(rs) - accs.size))
    return rows


def ranking(rows: list[SummaryRow]) -> dict[str, list[str]]:
    """Activations per axis value, best mean accuracy first."""
    out: dict[str, list[SummaryRow]] = {}
    for r in rows:
        out.setdefault(r.axis_value, []).append(r)
    key = lambda r: -r.mean_accuracy if not math.isnan(r.mean_accuracy) else math.inf
    return {v: [r.activation for r in sorted(rs, key=key)] for v, rs in out.items()}


def summary_csv(rows: list[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis_value", "activation", "runs", "mean_accuracy", "std_accuracy", "diverged"])
    for r in rows:
        w.writerow([r.axis_value, r.activation, r.runs, f"{r.mean_accuracy:.6f}",
                    f"{r.std_accuracy:.6f}", r.diverged])
    return buf.getvalue()


def summary_text(rows: list[SummaryRow]) -> str:
    header = ("axis_value", "activation", "runs", "accuracy", "diverged")
    body = [(r.axis_value, r.activation, str(r.runs),
             f"{r.mean_accuracy:.4f} +/- {r.std_accuracy:.4f}", str(r.diverged)) for r in rows]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header, *body]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    order = ranking(rows)
    lines.append("")
    lines += [f"ordering at {v}: {' > '.join(acts)}" for v, acts in order.items()]
    return "\n".join(lines) + "\n"


# --- config files ----------------------------------------------------------------


class ConfigError(ValueError):
    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        where = f"{path or '<config>'}" + (f":{lineno}" if lineno else "")
        super().__init__(f"{where}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class SweepConfig:
    axis: AblationAxis
    base: RunConfig
    output: str = "records.csv"
    workers: int = 1


def _key_line(text: str, section: str, key: str) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and s.split("=", 1)[0].strip().lower() == key:
            return i
    return None


def _split_list(raw: str) -> list[str]:
    return [p.strip() for p in raw.replace("\n", ",").split(",") if p.strip()]


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def parse_config(text: str, path: str | None = None) -> SweepConfig:
    """Parse an INI sweep config; errors carry the offending line number.

    Sections: [axis] name/values, [network], [train], [data],
    [sweep] activations/seeds/output/workers. Unknown keys are rejected.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse line {line!r}", lineno, path) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None), path) from None

    def fail(section, key, msg):
        raise ConfigError(msg, _key_line(text, section, key), path)

    allowed = {
        "axis": {"name": str, "values": str},
        "network": {f.name: f.type for f in fields(ArchConfig)},
        "train": {f.name: f.type for f in fields(TrainConfig) if f.name != "seed"},
        "data": {f.name: f.type for f in fields(DataConfig)},
        "sweep": {"activations": str, "seeds": str, "output": str, "workers": "int"},
    }
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}]", _section_line(text, section), path)
        for key in parser[section]:
            if key not in allowed[section]:
                fail(section, key, f"unknown key {key!r} in [{section}]")

    def typed(section, cls_fields):
        out = {}
        if not parser.has_section(section):
            return out
        for key, raw in parser[section].items():
            t = str(cls_fields[key])
            try:
                if "bool" in t:
                    if raw.strip().lower() not in _BOOL:
                        raise ValueError(f"not a boolean: {raw!r}")
                    out[key] = _BOOL[raw.strip().lower()]
                elif "None" in t and raw.strip().lower() in ("", "none"):
                    out[key] = None
                elif "int" in t:
                    out[key] = int(raw)
                elif "float" in t:
                    out[key] = float(raw)
                else:
                    out[key] = raw.strip()
            except ValueError as exc:
                fail(section, key, f"bad value for {key}: {exc}")
        return out

    if not parser.has_section("axis") or "name" not in parser["axis"]:
        raise ConfigError("missing [axis] name", None, path)
    name = parser["axis"]["name"].strip()
    try:
        raw_values = _split_list(parser["axis"].get("values", ""))
        axis = AblationAxis(name, tuple(raw_values or DEFAULT_AXIS_VALUES.get(name, ())))
    except (ValueError, KeyError) as exc:
        fail("axis", "values" if "values" in parser["axis"] else "name", str(exc))

    arch_kw = typed("network", allowed["network"])
    train_kw = typed("train", allowed["train"])
    data_kw = typed("data", allowed["data"])
    sweep = parser["sweep"] if parser.has_section("sweep") else {}
    try:
        arch = ArchConfig(**arch_kw)
        get_initializer(arch.initializer)
        arch.network_spec(2, 2, "identity", 0)
    except ValueError as exc:
        check = lambda kw: ArchConfig(**kw).network_spec(2, 2, "identity", 0)
        fail("network", _first_bad_key(check, arch_kw), str(exc))
    try:
        tcfg = TrainConfig(**train_kw)
    except ValueError as exc:
        fail("train", _first_bad_key(lambda kw: TrainConfig(**kw), train_kw), str(exc))
    try:
        acts = tuple(_split_list(sweep.get("activations", ""))) or DEFAULT_ACTIVATIONS
        base = RunConfig(arch, tcfg, DataConfig(**data_kw), acts, (0,))
    except ValueError as exc:
        fail("sweep", "activations", str(exc))
    for key in ("seeds", "workers"):
        try:
            [int(s) for s in _split_list(sweep.get(key, "0"))]
        except ValueError as exc:
            fail("sweep", key, f"bad value for {key}: {exc}")
    base = replace(base, seeds=tuple(int(s) for s in _split_list(sweep.get("seeds", "0"))))
    try:
        for v in axis.values:
            probe = axis.apply(base, v)
            probe.arch.network_spec(2, 2, acts[0], 0)
            TrainConfig(**asdict(probe.train))
    except ValueError as exc:
        fail("axis", "values", f"axis value rejected: {exc}")
    return SweepConfig(axis, base, sweep.get("output", "records.csv"), int(sweep.get("workers", "1")))


def _first_bad_key(build, kwargs: dict) -> str:
    """Key whose addition first makes ``build`` raise."""
    partial = {}
    for key, val in kwargs.items():
        partial[key] = val
        try:
            build(partial)
        except ValueError:
            return key
    return next(iter(kwargs), "")


def _section_line(text: str, section: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f"[{section}]":
            return i
    return None


def load_config(path: str | Path) -> SweepConfig:
    return parse_config(Path(path).read_text(), str(path))
