"""Run the default DenseUnits sweep on synthetic blobs and pin its accuracy band.

Writes tests/fixtures/ablation_band.json and the raw records next to it.
"""
import argparse
import json
from dataclasses import asdict
from pathlib import Path

from serf import ablation
from serf.training import TrainConfig

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=ROOT / "tests" / "fixtures" / "ablation_band.json", type=Path)
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    base = ablation.RunConfig(
        train=TrainConfig("sgd", 0.1, batch_size=64, epochs=10),
        data=ablation.DataConfig(name="blobs"),
        seeds=(0, 1, 2),
    )
    axis = ablation.AblationAxis("dense_units", (32, 64, 128))
    records = ablation.run_ablation(axis, base, args.out.with_suffix(".records.csv"), args.workers)
    accs = [r.test_accuracy for r in records]
    band = {
        "axis": asdict(axis),
        "activations": list(base.activations),
        "seeds": list(base.seeds),
        "data": asdict(base.data),
        "train": asdict(base.train),
        "records": len(records),
        "min_accuracy": min(accs),
        "max_accuracy": max(accs),
        "floor": 0.9,
    }
    args.out.write_text(json.dumps(band, indent=2) + "\n")
    print(ablation.summary_text(ablation.summarize(records)), end="")
    print(f"band [{min(accs)}, {max(accs)}] over {len(records)} records -> {args.out}")


if __name__ == "__main__":
    main()
