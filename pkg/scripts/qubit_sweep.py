"""Validation and test metrics of G3 with 150 gates as the qubit count grows."""

import argparse
from dataclasses import replace
from pathlib import Path

from qrc import experiments as ex


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--data", default="synthetic:1")
    p.add_argument("--sims", type=int, default=10)
    p.add_argument("--workers", type=int, default=ex.default_workers())
    p.add_argument("--out", default="results/fig4")
    args = p.parse_args()

    plan = replace(ex.load_preset("paper-fig4"), n_sims=args.sims)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = ex.run_sweep(plan, ex.load_dataset(args.data), out / "results.csv", workers=args.workers)
    summary = ex.aggregate(results)
    ex.emit_plotdata(summary, out)
    for row in sorted(summary, key=lambda r: (r["split"], r["n_qubits"])):
        print(f"{row['split']:4s} N={row['n_qubits']}  MAE {row['mae_unscaled_mean']:.4f}  MDA {row['mda_mean']:.3f}")


if __name__ == "__main__":
    main()
