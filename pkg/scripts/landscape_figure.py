"""Render output landscapes for several activations with shared weights.

Writes <out>/<kind>.pgm and <kind>.csv plus stats.csv with the mean
|discrete Laplacian| of each field, smoothest first.
"""
import argparse
import csv
from pathlib import Path

from serf import landscape


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kinds", default="relu,leaky_relu,elu,swish,mish,gelu,serf")
    ap.add_argument("--seed", type=int, default=landscape.DEFAULT_SEED)
    ap.add_argument("--res", type=int, default=256)
    ap.add_argument("--extent", type=float, default=10.0)
    ap.add_argument("--out", type=Path, default=Path("runs/landscape"))
    args = ap.parse_args()

    grid = landscape.GridSpec(-args.extent, args.extent, -args.extent, args.extent, args.res)
    args.out.mkdir(parents=True, exist_ok=True)
    stats = []
    for kind in args.kinds.split(","):
        field = landscape.render(landscape.landscape_spec(kind, seed=args.seed), grid)
        landscape.write_pgm(field, args.out / f"{kind}.pgm")
        landscape.write_field_csv(field, grid, args.out / f"{kind}.csv")
        stats.append((landscape.mean_abs_laplacian(field, grid), kind))
    stats.sort()
    with open(args.out / "stats.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["activation", "mean_abs_laplacian"])
        for value, kind in stats:
            w.writerow([kind, repr(value)])
            print(f"{kind:<12} {value:.6g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
