"""Command-line entry point: ``serf <subcommand> [flags]``.

Exit codes: 0 success, 1 validation or property failure, 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from serf import ablation, landscape
from serf.activations import KIND_NAMES, get_activation, serf_decompose
from serf.gradcheck import check_activation

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_FAIL):
        super().__init__(message)
        self.code = code


def _kinds(raw: str | None, default):
    names = default if raw is None else [k for k in raw.split(",") if k.strip()]
    try:
        return [get_activation(k) for k in names]
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def cmd_curves(args) -> int:
    if not args.xmin < args.xmax:
        raise CliError(f"--xmin ({args.xmin}) must be below --xmax ({args.xmax})")
    if args.n < 2:
        raise CliError(f"--n must be >= 2, got {args.n}")
    kinds = _kinds(args.kinds, ["swish", "mish", "serf"])
    xs = np.linspace(args.xmin, args.xmax, args.n)
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "kind", "f", "df", "d2f"])
        for k in kinds:
            f, df, d2f = k.value(xs), k.grad(xs), k.second_grad(xs)
            for row in zip(xs, f, df, d2f):
                w.writerow([repr(float(row[0])), str(k), *(repr(float(v)) for v in row[1:])])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    if args.tol < 0:
        raise CliError(f"--tol must be non-negative, got {args.tol}")
    if args.samples < 1:
        raise CliError(f"--samples must be >= 1, got {args.samples}")
    kinds = _kinds(args.kinds, KIND_NAMES)
    failed = 0
    for k in kinds:
        res = check_activation(k, args.samples, args.tol, args.seed,
                               exclude_kinks=not args.no_kink_exclusion)
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        print(f"{status}  {res.kind:<16} samples={res.samples:<6} "
              f"worst_x={res.worst_x:+.6e} worst_err={res.worst_error:.3e} tol={res.tol:.1e}")
    print(f"{len(kinds) - failed}/{len(kinds)} kinds passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_landscape(args) -> int:
    if args.res < 2:
        raise CliError(f"--res must be >= 2, got {args.res}")
    act = _kinds(args.activation, [])[0]
    grid = landscape.GridSpec(-args.extent, args.extent, -args.extent, args.extent, args.res)
    spec = landscape.landscape_spec(act, args.layers, args.width, args.seed, args.initializer)
    field = landscape.render(spec, grid)
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        landscape.write_pgm(field, out.with_suffix(".pgm"))
        landscape.write_field_csv(field, grid, out.with_suffix(".csv"))
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}", EXIT_IO) from None
    stat = landscape.mean_abs_laplacian(field, grid)
    if stat is None:
        print(f"activation={act} mean_abs_laplacian=0 (undefined below a 3x3 grid)")
    else:
        print(f"activation={act} mean_abs_laplacian={stat!r}")
    print(f"wrote {out.with_suffix('.pgm')} and {out.with_suffix('.csv')}")
    return EXIT_OK


def cmd_ablate(args) -> int:
    try:
        cfg = ablation.load_config(args.config)
    except OSError as exc:
        raise CliError(f"cannot read {args.config}: {exc.strerror}", EXIT_IO) from None
    except ablation.ConfigError as exc:
        raise CliError(str(exc), EXIT_IO) from None
    out = Path(args.out_dir) / "records.csv" if args.out_dir else Path(cfg.output)
    workers = args.workers or cfg.workers

    def show(rec):
        print(f"{rec.axis}={rec.axis_value:<8} {rec.activation:<10} seed={rec.seed} "
              f"{rec.status} acc={rec.test_accuracy:.4f} loss={rec.train_loss:.4f} "
              f"({rec.wall_time:.1f}s)", flush=True)

    try:
        records = ablation.run_ablation(cfg.axis, cfg.base, out, workers, progress=show)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}", EXIT_IO) from None
    rows = ablation.summarize(records)
    print()
    print(ablation.summary_text(rows), end="")
    print(f"records: {out}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    try:
        records = ablation.read_records(args.records)
    except OSError as exc:
        raise CliError(f"cannot read {args.records}: {exc.strerror}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(f"{args.records}: {exc}", EXIT_IO) from None
    if not records:
        raise CliError(f"{args.records}: no records")
    rows = ablation.summarize(records)
    text = ablation.summary_csv(rows) if args.format == "csv" else ablation.summary_text(rows)
    fh = _open_out(args.out)
    try:
        fh.write(text)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_decompose(args) -> int:
    for x in args.x:
        d = serf_decompose(x)
        print(f"x={x!r} precond={d.precond!r} swish={d.swish_val!r} gate={d.gate!r} "
              f"total={d.total!r} residual={d.residual!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="serf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    valid = ", ".join(KIND_NAMES)

    s = sub.add_parser("curves", help="sample f, f', f'' of activations on a grid (CSV)")
    s.add_argument("--kinds", help=f"comma-separated kinds (default swish,mish,serf); valid: {valid}")
    s.add_argument("--xmin", type=float, default=-5.0, help="grid start (default -5)")
    s.add_argument("--xmax", type=float, default=5.0, help="grid end (default 5)")
    s.add_argument("--n", type=int, default=201, help="number of grid points, >= 2 (default 201)")
    s.add_argument("--out", default="-", help="output CSV path, '-' for stdout (default)")
    s.set_defaults(func=cmd_curves)

    s = sub.add_parser("gradcheck", help="finite-difference check of every activation gradient")
    s.add_argument("--kinds", help=f"comma-separated kinds (default all); valid: {valid}")
    s.add_argument("--samples", type=int, default=10_000, help="points per kind (default 10000)")
    s.add_argument("--tol", type=float, default=1e-6,
                   help="max |grad - fd| / max(1, |grad|) (default 1e-6)")
    s.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    s.add_argument("--no-kink-exclusion", action="store_true",
                   help="also test |x| <= 1e-3 for kinds with a kink at 0")
    s.set_defaults(func=cmd_gradcheck)

    s = sub.add_parser("landscape", help="render a random network's output landscape")
    s.add_argument("--activation", default="serf", help="activation kind (default serf)")
    s.add_argument("--seed", type=int, default=landscape.DEFAULT_SEED, help="weight seed (default 0)")
    s.add_argument("--layers", type=int, default=landscape.DEFAULT_LAYERS, help="hidden layers (default 6)")
    s.add_argument("--width", type=int, default=landscape.DEFAULT_WIDTH, help="units per layer (default 16)")
    s.add_argument("--initializer", default=landscape.DEFAULT_INITIALIZER,
                   help="weight initializer (default glorot_normal)")
    s.add_argument("--res", type=int, default=256, help="grid points per side, >= 2 (default 256)")
    s.add_argument("--extent", type=float, default=10.0, help="grid covers [-extent, extent]^2 (default 10)")
    s.add_argument("--out", default="landscape", help="output path stem; writes .pgm and .csv")
    s.set_defaults(func=cmd_landscape)

    s = sub.add_parser("ablate", help="run an ablation sweep from an INI config")
    s.add_argument("--config", required=True, help="sweep config file")
    s.add_argument("--out-dir", help="directory for records.csv (overrides [sweep] output)")
    s.add_argument("--workers", type=int, default=0, help="parallel cells (default: config value)")
    s.set_defaults(func=cmd_ablate)

    s = sub.add_parser("summarize", help="mean/std accuracy table from records.csv")
    s.add_argument("--records", required=True, help="records CSV written by ablate")
    s.add_argument("--format", choices=("text", "csv"), default="text", help="output format")
    s.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    s.set_defaults(func=cmd_summarize)

    s = sub.add_parser("decompose", help="print the preconditioner split of serf'(x)")
    s.add_argument("--x", type=float, nargs="+", required=True, help="one or more points")
    s.set_defaults(func=cmd_decompose)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"serf {args.command}: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
