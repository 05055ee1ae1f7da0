"""Histogram data for the G3 cost of Trotterized Ising reservoirs."""

import argparse

import numpy as np

from qrc import experiments as ex


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sims", type=int, default=100)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--trotter", type=int, default=None)
    p.add_argument("--out", default="results/fig3")
    args = p.parse_args()

    counts = ex.ising_counts(args.sims, trotter_steps=args.trotter, epsilon=args.eps)
    ex.emit_plotdata([], args.out, counts)
    values = np.array([c for _, c in counts])
    mu, sigma = ex.lognormal_fit(values)
    hist, edges = np.histogram(values, bins=10)
    for h, lo, hi in zip(hist, edges, edges[1:]):
        print(f"{lo:8.0f} - {hi:8.0f}  {'#' * h}")
    print(f"mean {values.mean():.0f}, log-normal mu={mu:.4f} sigma={sigma:.4f}")


if __name__ == "__main__":
    main()
