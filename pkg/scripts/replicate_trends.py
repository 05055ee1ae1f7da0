"""Family trends over independent synthetic series.

Every simulation draws a fresh series and a fresh reservoir, so the spread
reflects both data and circuit randomness.
"""

import argparse

import numpy as np

from qrc import experiments as ex


def summarize(runs, split="test"):
    mda = np.mean([out.reports[split].mda for _, out in runs])
    mae = np.mean([out.reports[split].mae for _, out in runs])
    spread = np.mean([np.std(out.reports[split].predictions) for _, out in runs])
    return mda, mae, spread


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sims", type=int, default=20)
    p.add_argument("--families", default="G1,G2,G3,MG")
    p.add_argument("--gates", default="10,100,150")
    p.add_argument("--n-qubits", type=int, default=7)
    p.add_argument("--regressors", action="store_true")
    args = p.parse_args()
    scenario = "with_regressors" if args.regressors else "no_regressors"

    baseline = None
    for family in args.families.split(","):
        for g in (int(x) for x in args.gates.split(",")):
            runs = ex.synthetic_replicates(family, g, args.n_qubits, args.sims, scenario)
            if baseline is None:
                baseline = np.mean([ex.no_skill_mda(d) for d, _ in runs])
                print(f"no-skill test MDA {baseline:.3f}")
            mda, mae, spread = summarize(runs)
            print(f"{family:5s} {g:5d}  MDA {mda:.3f}  MAE {mae:.4f}  prediction std {spread:.4f}")


if __name__ == "__main__":
    main()
