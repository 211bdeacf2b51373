"""Run every sweep config in a directory and write a summary next to each records file."""
import argparse
from pathlib import Path

from serf import ablation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("configs", nargs="*", type=Path,
                    help="config files (default: every configs/*.ini except smoke.ini)")
    ap.add_argument("--workers", type=int, default=0, help="override the configs' worker count")
    args = ap.parse_args()

    root = Path(__file__).resolve().parents[1]
    paths = args.configs or sorted(p for p in (root / "configs").glob("*.ini") if p.stem != "smoke")
    for path in paths:
        cfg = ablation.load_config(path)
        out = Path(cfg.output)
        print(f"== {path.name}: {cfg.axis.name} = {list(cfg.axis.values)} -> {out}", flush=True)
        records = ablation.run_ablation(cfg.axis, cfg.base, out, args.workers or cfg.workers)
        rows = ablation.summarize(records)
        text = ablation.summary_text(rows)
        out.with_name("summary.txt").write_text(text)
        out.with_name("summary.csv").write_text(ablation.summary_csv(rows))
        print(text)


if __name__ == "__main__":
    main()
