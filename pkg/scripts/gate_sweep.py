"""MAE / MDA vs gate count for each family, with or without regressors.

    python scripts/gate_sweep.py --sims 10 --out results/fig2
    python scripts/gate_sweep.py --regressors --sims 10 --out results/fig5
"""

import argparse
import logging
from dataclasses import replace
from pathlib import Path

from qrc import experiments as ex


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--data", default="synthetic:1")
    p.add_argument("--sims", type=int, default=10)
    p.add_argument("--families", default=",".join(ex.ALL_FAMILIES))
    p.add_argument("--gates", default=",".join(map(str, ex.GATE_GRID)))
    p.add_argument("--regressors", action="store_true")
    p.add_argument("--workers", type=int, default=ex.default_workers())
    p.add_argument("--out", required=True)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO)

    plan = ex.load_preset("paper-fig5" if args.regressors else "paper-fig2")
    plan = replace(plan, n_sims=args.sims,
                   families=tuple(f.strip().upper() for f in args.families.split(",")),
                   gate_counts=tuple(int(g) for g in args.gates.split(",")))
    data = ex.load_dataset(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = ex.aggregate(ex.run_sweep(plan, data, out / "results.csv", workers=args.workers))
    ex.emit_plotdata(summary, out)
    for row in summary:
        if row["split"] == "test":
            print(f"{row['family']:5s} {row['gate_count']:5d}  MAE {row['mae_unscaled_mean']:.4f}  "
                  f"MDA {row['mda_mean']:.3f} +- {row['mda_std']:.3f}")


if __name__ == "__main__":
    main()
