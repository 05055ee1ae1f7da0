"""Command line entry point ``qrc``.

    qrc sweep --plan paper-fig2 --data synthetic:1 --out results/ --workers 4
    qrc ising-count --sims 100 --eps 1e-3
    qrc predict --family G3 --gates 150 --data prices.csv
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from qrc import experiments, ising
from qrc.errors import ConfigurationError, FormatError

log = logging.getLogger("qrc")


def _load_plan(spec: str) -> experiments.SweepPlan:
    if spec in experiments.PRESETS:
        return experiments.load_preset(spec)
    path = Path(spec)
    if not path.is_file():
        raise ConfigurationError(f"plan {spec!r} is neither a preset {sorted(experiments.PRESETS)} nor a file")
    return experiments.parse_plan(path.read_text(encoding="utf-8"))


def cmd_sweep(args) -> int:
    plan = _load_plan(args.plan)
    overrides = {}
    if args.sims is not None:
        overrides["n_sims"] = args.sims
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if args.no_intercept:
        overrides["fit_intercept"] = False
    plan = replace(plan, **overrides)
    data = experiments.load_dataset(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = experiments.run_sweep(plan, data, out / "results.csv", workers=args.workers)
    summary = experiments.aggregate(results)
    counts = None
    if "ISING" in plan.families:
        n = max(plan.qubit_counts)
        counts = experiments.ising_counts(plan.n_sims, plan.base_seed, n_qubits=n)
    experiments.emit_plotdata(summary, out, counts)
    log.info("wrote %d result rows to %s", len(results), out / "results.csv")
    return 0


def cmd_ising_count(args) -> int:
    counts = experiments.ising_counts(
        args.sims, args.seed, n_qubits=args.n_qubits, Js=args.js, ratio=args.ratio, T=args.time,
        trotter_steps=args.trotter, epsilon=args.eps, c0=args.c0, c1=args.c1,
    )
    if args.out:
        experiments.emit_plotdata([], args.out, counts)
    values = [c for _, c in counts]
    mu, sigma = experiments.lognormal_fit(values)
    print(f"sims={len(values)} mean={sum(values) / len(values):.1f} min={min(values)} max={max(values)} "
          f"lognormal_mu={mu:.6g} lognormal_sigma={sigma:.6g}")
    return 0


def cmd_predict(args) -> int:
    data = experiments.load_dataset(args.data)
    scenario = "with_regressors" if args.regressors else "no_regressors"
    family = args.family.upper()
    plan = experiments.SweepPlan(families=(family,), gate_counts=(args.gates,), n_sims=1,
                                 qubit_counts=(args.n_qubits,), scenario=scenario, base_seed=args.seed,
                                 gamma=args.gamma, fit_intercept=not args.no_intercept)
    item = experiments.work_items(plan)[0]
    out = experiments.run_single(item, plan, data)
    report = out.reports["test"]
    actual = data.series.values[out.test_times]
    labels = data.series.week_labels()
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["week", "actual", "predicted"])
        for t, a, p in zip(out.test_times, actual, report.predictions):
            w.writerow([labels[t], f"{a:.17g}", f"{p:.17g}"])
    finally:
        if fh is not sys.stdout:
            fh.close()
    log.info("test MAE=%.4f MDA=%.3f", report.mae, report.mda)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrc", description="Quantum reservoir computing experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="run a family x gate-count x qubit-count sweep")
    s.add_argument("--plan", required=True, help="preset name or key = value plan file")
    s.add_argument("--data", required=True, help="daily price CSV or synthetic:<seed>")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--sims", type=int, help="override n_sims")
    s.add_argument("--seed", type=int, help="override base_seed")
    s.add_argument("--gamma", type=float, help="override the ridge penalty")
    s.add_argument("--no-intercept", action="store_true", help="fit without an intercept")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("ising-count", help="G3 gate counts of Trotterized Ising reservoirs")
    c.add_argument("--sims", type=int, default=100)
    c.add_argument("--eps", type=float, default=ising.DEFAULT_EPSILON, help="rotation synthesis precision")
    c.add_argument("--trotter", type=int, default=None, help="Trotter steps (default: per-Hamiltonian)")
    c.add_argument("--n-qubits", type=int, default=7)
    c.add_argument("--js", type=float, default=ising.DEFAULT_JS)
    c.add_argument("--ratio", type=float, default=ising.DEFAULT_RATIO)
    c.add_argument("--time", type=float, default=ising.DEFAULT_TIME)
    c.add_argument("--c0", type=float, default=ising.RZ_C0)
    c.add_argument("--c1", type=float, default=ising.RZ_C1)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", help="directory for fig3.csv and fig3_fit.csv")
    c.set_defaults(func=cmd_ising_count)

    r = sub.add_parser("predict", help="test-set forecast of one reservoir")
    r.add_argument("--family", required=True)
    r.add_argument("--gates", type=int, default=150)
    r.add_argument("--data", required=True)
    r.add_argument("--n-qubits", type=int, default=7)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--regressors", action="store_true", help="append regressor columns to the features")
    r.add_argument("--gamma", type=float, default=None)
    r.add_argument("--no-intercept", action="store_true")
    r.add_argument("--out", help="CSV path (default stdout)")
    r.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, FormatError) as exc:
        print(f"qrc: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary, exit code 1
        print(f"qrc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
