"""Sweeps over reservoir families, gate counts and qubit counts.

Every simulation is an independent work item whose seed is a stable hash of
its coordinates, so adding grid points never changes existing rows and serial
and parallel runs agree bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from qrc import dataio, gates, ising, readout
from qrc.errors import ConfigurationError, FormatError
from qrc.reservoir import ReservoirConfig, run_series, segment_unitaries

log = logging.getLogger(__name__)

ALL_FAMILIES = ("G1", "G2", "G3", "MG", "D2", "D3", "DN", "ISING")
FIXED_SIZE = ("D2", "D3", "DN", "ISING")
SCENARIOS = ("no_regressors", "with_regressors")
GATE_GRID = (10, 20, 40, 60, 100, 150, 200, 300, 400, 500, 600, 700, 800, 900, 1000)


@dataclass(frozen=True)
class SweepPlan:
    families: tuple[str, ...] = ALL_FAMILIES
    gate_counts: tuple[int, ...] = GATE_GRID
    n_sims: int = 100
    qubit_counts: tuple[int, ...] = (7,)
    scenario: str = "no_regressors"
    base_seed: int = 0
    gamma: float | None = None
    n_v: int = 2
    washout: int = 10
    input_qubits: int = 1
    fit_intercept: bool = True

    def __post_init__(self):
        if self.n_sims < 1:
            raise ConfigurationError(f"n_sims must be >= 1, got {self.n_sims}")
        if not self.families or not self.gate_counts or not self.qubit_counts:
            raise ConfigurationError("families, gate_counts and qubit_counts must be nonempty")
        bad = [f for f in self.families if f not in ALL_FAMILIES]
        if bad:
            raise ConfigurationError(f"unknown families {bad}")
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")

    @property
    def ridge_gamma(self) -> float:
        if self.gamma is not None:
            return self.gamma
        if self.scenario == "with_regressors":
            return readout.GAMMA_WITH_REGRESSORS
        return readout.GAMMA_NO_REGRESSORS


PRESETS = {
    "paper-fig2": SweepPlan(),
    "paper-fig5": SweepPlan(scenario="with_regressors"),
    "paper-fig4": SweepPlan(families=("G3",), gate_counts=(150,), qubit_counts=tuple(range(2, 9))),
}


def _parse_value(name: str, raw: str, kind):
    raw = raw.strip()
    if kind is bool:
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {raw!r}")
        return raw.lower() in ("true", "1", "yes")
    if name == "gamma":
        return None if raw.lower() in ("", "none", "auto") else float(raw)
    if name == "families":
        return tuple(s.strip().upper() for s in raw.split(",") if s.strip())
    if name in ("gate_counts", "qubit_counts"):
        return tuple(int(s) for s in raw.split(",") if s.strip())
    return kind(raw)


def parse_plan(text: str, base: SweepPlan | None = None) -> SweepPlan:
    """Parse ``key = value`` lines; ``preset = <name>`` picks the starting plan."""
    types = {"families": tuple, "gate_counts": tuple, "qubit_counts": tuple, "n_sims": int,
             "scenario": str, "base_seed": int, "gamma": float, "n_v": int, "washout": int,
             "input_qubits": int, "fit_intercept": bool}
    values = {}
    plan = base or SweepPlan()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"plan line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key == "preset":
            plan = load_preset(raw)
            continue
        if key not in types:
            raise FormatError(f"plan line {lineno}: unknown key {key!r}")
        try:
            values[key] = _parse_value(key, raw, types[key])
        except ValueError as exc:
            raise FormatError(f"plan line {lineno}: {exc}") from exc
    return replace(plan, **values)


def load_preset(name: str) -> SweepPlan:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass
class Dataset:
    series: dataio.PriceSeries
    split: dataio.SplitSpec
    scaler: dataio.Scaler
    scaled: np.ndarray
    encoded: np.ndarray
    regressors: np.ndarray | None = None

    @property
    def regressor_names(self):
        return self.series.regressor_names


def prepare_dataset(series: dataio.PriceSeries, split: dataio.SplitSpec | None = None) -> Dataset:
    """Scale on the training split; clip only the copy that is encoded into qubits."""
    split = split or dataio.split_paper_default(len(series))
    scaler = dataio.fit_scaler(series.values, split)
    scaled = scaler.apply(series.values)
    regs = None
    if series.regressors is not None:
        cols = []
        for j in range(series.regressors.shape[1]):
            col = series.regressors[:, j]
            lo, hi = col[: split.train_end].min(), col[: split.train_end].max()
            cols.append((col - lo) / (hi - lo) if hi > lo else np.zeros_like(col))
        regs = np.column_stack(cols)
    return Dataset(series, split, scaler, scaled, dataio.clip_unit(scaled), regs)


def synthetic_dataset(seed: int, length: int = dataio.FULL_LENGTH, n_regressors: int = 9) -> Dataset:
    recipe = dataio.SyntheticRecipe(n_regressors=n_regressors)
    return prepare_dataset(dataio.synthesize_series(length, seed, recipe))


def load_dataset(spec: str) -> Dataset:
    """``synthetic:<seed>`` or the path of a daily price CSV."""
    if spec.startswith("synthetic:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad synthetic data spec {spec!r}") from None
        return synthetic_dataset(seed)
    records, names = dataio.load_daily_csv(spec)
    return prepare_dataset(dataio.aggregate_weekly(records, names))


def derive_seed(base_seed: int, family: str, gate_count: int, n_qubits: int, sim: int) -> int:
    key = f"{base_seed}|{family}|{gate_count}|{n_qubits}|{sim}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little") >> 1


@dataclass(frozen=True)
class WorkItem:
    family: str
    gate_count: int
    n_qubits: int
    sim: int
    seed: int


@dataclass(frozen=True)
class ExperimentResult:
    family: str
    gate_count: int
    n_qubits: int
    sim: int
    seed: int
    scenario: str
    split: str
    mae_scaled: float
    mae_unscaled: float
    mda: float

    def to_row(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(f"{v:.17g}" if isinstance(v, float) else str(v))
        return out


RESULT_COLUMNS = [f.name for f in fields(ExperimentResult)]


def fixed_gate_count(family: str, n_qubits: int) -> int:
    if family in ("D2", "D3"):
        return math.comb(n_qubits, int(family[1]))
    if family == "DN":
        return 1
    return 0


def build_evolution(family: str, n_qubits: int, gate_count: int, seed: int):
    if family == "ISING":
        return ising.sample_ising(n_qubits, seed=seed)
    return gates.sample_circuit(family, n_qubits, gate_count, seed)


def work_items(plan: SweepPlan) -> list[WorkItem]:
    items = []
    for n in plan.qubit_counts:
        for family in plan.families:
            counts = [fixed_gate_count(family, n)] if family in FIXED_SIZE else plan.gate_counts
            for g in counts:
                for sim in range(plan.n_sims):
                    items.append(WorkItem(family, g, n, sim, derive_seed(plan.base_seed, family, g, n, sim)))
    return items


@dataclass
class RunOutput:
    reports: dict
    model: readout.RidgeModel
    test_times: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))


def run_single(item: WorkItem, plan: SweepPlan, data: Dataset) -> RunOutput:
    """Train one reservoir on the training split and score validation and test."""
    evo = build_evolution(item.family, item.n_qubits, item.gate_count, item.seed)
    config = ReservoirConfig(item.n_qubits, evo, plan.input_qubits, plan.n_v, plan.washout, item.seed)
    use_regs = plan.scenario == "with_regressors"
    if use_regs and data.regressors is None:
        raise ConfigurationError("scenario with_regressors needs a dataset with regressor columns")
    fm = run_series(data.encoded, config, data.regressors if use_regs else None, data.regressor_names,
                    seg_unitaries=segment_unitaries(config))
    # features at time t forecast the value at t + 1
    keep = fm.times < len(data.scaled) - 1
    X, t = fm.values[keep], fm.times[keep]
    target, prev = data.scaled[t + 1], data.scaled[t]
    sp = data.split
    masks = {
        "train": t + 1 < sp.train_end,
        "val": (t + 1 >= sp.train_end) & (t + 1 < sp.val_end),
        "test": t + 1 >= sp.val_end,
    }
    if masks["train"].sum() < 2:
        raise ConfigurationError("washout leaves fewer than 2 training rows")
    model = readout.fit_ridge(X[masks["train"]], target[masks["train"]], plan.ridge_gamma, plan.fit_intercept)
    reports = {
        name: readout.evaluate(model, X[m], target[m], prev[m], data.scaler)
        for name, m in masks.items() if name != "train"
    }
    return RunOutput(reports, model, t[masks["test"]] + 1)


def _run_item(args) -> list[ExperimentResult] | str:
    item, plan, data = args
    try:
        out = run_single(item, plan, data)
    except ConfigurationError as exc:
        return f"skip {item.family} N={item.n_qubits} gates={item.gate_count}: {exc}"
    return [
        ExperimentResult(item.family, item.gate_count, item.n_qubits, item.sim, item.seed, plan.scenario,
                         split, rep.mae_scaled, rep.mae, rep.mda)
        for split, rep in out.reports.items()
    ]


_WORKER_DATA = {}


def _init_worker(plan, data):
    _WORKER_DATA["ctx"] = (plan, data)


def _run_item_worker(item):
    plan, data = _WORKER_DATA["ctx"]
    return _run_item((item, plan, data))


def run_sweep(plan: SweepPlan, data: Dataset, out_path=None, workers: int = 1) -> list[ExperimentResult]:
    """Run every work item; rows are written in plan order as they complete."""
    items = work_items(plan)
    results = []
    writer = fh = None
    if out_path is not None:
        fh = open(out_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
    try:
        if workers > 1:
            pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(plan, data))
            outputs = pool.map(_run_item_worker, items, chunksize=1)
        else:
            pool = None
            outputs = (_run_item((it, plan, data)) for it in items)
        for out in outputs:
            if isinstance(out, str):
                log.warning(out)
                continue
            results.extend(out)
            if writer is not None:
                writer.writerows(r.to_row() for r in out)
                fh.flush()
        if pool is not None:
            pool.shutdown()
    finally:
        if fh is not None:
            fh.close()
    return results


def read_results(path) -> list[ExperimentResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        out.append(ExperimentResult(r["family"], int(r["gate_count"]), int(r["n_qubits"]), int(r["sim"]),
                                    int(r["seed"]), r["scenario"], r["split"], float(r["mae_scaled"]),
                                    float(r["mae_unscaled"]), float(r["mda"])))
    return out


SUMMARY_KEYS = ("scenario", "family", "gate_count", "n_qubits", "split")
METRICS = ("mae_scaled", "mae_unscaled", "mda")


def aggregate(results) -> list[dict]:
    """Mean and sample standard deviation of each metric per configuration."""
    groups: dict[tuple, list[ExperimentResult]] = {}
    for r in results:
        groups.setdefault(tuple(getattr(r, k) for k in SUMMARY_KEYS), []).append(r)
    summary = []
    for key, rows in groups.items():
        entry = dict(zip(SUMMARY_KEYS, key))
        entry["n"] = len(rows)
        for m in METRICS:
            vals = np.array([getattr(r, m) for r in rows])
            entry[f"{m}_mean"] = float(vals.mean())
            entry[f"{m}_std"] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        summary.append(entry)
    return summary


SUMMARY_COLUMNS = list(SUMMARY_KEYS) + ["n"] + [f"{m}_{s}" for m in METRICS for s in ("mean", "std")]


def _write_rows(path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([f"{row[c]:.17g}" if isinstance(row[c], float) else row[c] for c in columns])


def lognormal_fit(counts) -> tuple[float, float]:
    """Moment-matched ``(mu, sigma)`` of a log-normal with the sample mean and variance."""
    c = np.asarray(counts, dtype=float)
    mean, var = c.mean(), c.var(ddof=1) if len(c) > 1 else 0.0
    sigma2 = math.log1p(var / mean**2)
    return math.log(mean) - sigma2 / 2, math.sqrt(sigma2)


PLOT_README = """\
# Plot data

All files are UTF-8 CSV with a header row.

- `summary.csv`: one row per (scenario, family, gate_count, n_qubits, split) with
  the run count `n` and mean / sample std of `mae_scaled`, `mae_unscaled` and `mda`.
- `fig2.csv`: test-split metrics vs `gate_count` per `family`, no regressors.
  Diagonal families report their fixed diagonal-gate count; ISING reports 0.
- `fig4.csv`: test-split metrics of G3 with 150 gates vs `n_qubits`, no regressors.
- `fig5.csv`: as `fig2.csv` with regressors.
- `fig3.csv`: `sim,seed,count` G3 gate counts of Trotterized Ising evolutions.
- `fig3_fit.csv`: log-normal fit of the counts (`mu`, `sigma`, `mean`) and
  `count,pdf` samples of the fitted density.
"""


def emit_plotdata(summary, out_dir, ising_counts=None) -> list[Path]:
    """Write per-figure CSVs and a README describing their columns."""
    if not summary and not ising_counts:
        raise ConfigurationError("refusing to emit plot data from an empty summary")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    cols = ["family", "gate_count", "n_qubits", "n"] + [f"{m}_{s}" for m in METRICS for s in ("mean", "std")]
    if summary:
        _write_rows(out_dir / "summary.csv", SUMMARY_COLUMNS, summary)
        written.append(out_dir / "summary.csv")
        test = [s for s in summary if s["split"] == "test"]
        figs = {
            "fig2.csv": [s for s in test if s["scenario"] == "no_regressors"],
            "fig5.csv": [s for s in test if s["scenario"] == "with_regressors"],
            "fig4.csv": sorted(
                (s for s in test if s["scenario"] == "no_regressors" and s["family"] == "G3" and s["gate_count"] == 150),
                key=lambda s: s["n_qubits"],
            ),
        }
        for name, rows in figs.items():
            if rows:
                _write_rows(out_dir / name, cols, rows)
                written.append(out_dir / name)
    if ising_counts:
        rows = [{"sim": i, "seed": s, "count": c} for i, (s, c) in enumerate(ising_counts)]
        _write_rows(out_dir / "fig3.csv", ["sim", "seed", "count"], rows)
        counts = [c for _, c in ising_counts]
        mu, sigma = lognormal_fit(counts)
        with open(out_dir / "fig3_fit.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(f"mu,sigma,mean\n{mu:.17g},{sigma:.17g},{float(np.mean(counts)):.17g}\n")
            fh.write("count,pdf\n")
            if sigma > 0:
                for x in np.linspace(min(counts) * 0.8, max(counts) * 1.2, 101):
                    pdf = math.exp(-((math.log(x) - mu) ** 2) / (2 * sigma**2)) / (x * sigma * math.sqrt(2 * math.pi))
                    fh.write(f"{x:.17g},{pdf:.17g}\n")
        written += [out_dir / "fig3.csv", out_dir / "fig3_fit.csv"]
    (out_dir / "README.md").write_text(PLOT_README, encoding="utf-8")
    written.append(out_dir / "README.md")
    return written


def ising_counts(n_sims: int, base_seed: int = 0, n_qubits: int = 7, Js: float = ising.DEFAULT_JS,
                 ratio: float = ising.DEFAULT_RATIO, T: float = ising.DEFAULT_TIME,
                 trotter_steps: int | None = None, epsilon: float = ising.DEFAULT_EPSILON,
                 c0: float = ising.RZ_C0, c1: float = ising.RZ_C1) -> list[tuple[int, int]]:
    """``(seed, count)`` for ``n_sims`` random Ising reservoirs."""
    if n_sims < 1:
        raise ConfigurationError(f"n_sims must be >= 1, got {n_sims}")
    out = []
    for sim in range(n_sims):
        seed = derive_seed(base_seed, "ISING", 0, n_qubits, sim)
        spec = ising.sample_ising(n_qubits, Js, ratio, seed, T)
        out.append((seed, ising.estimate_g3_count(spec, T, trotter_steps, epsilon, c0, c1)))
    return out


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def series_seed(base_seed: int, sim: int) -> int:
    """Seed of the synthetic series used by simulation ``sim`` (shared by all families)."""
    return derive_seed(base_seed, "SERIES", 0, 0, sim)


def no_skill_mda(data: Dataset, split: str = "test") -> float:
    """MDA of always forecasting the training mean, the limit of a reservoir that forgets its input."""
    sp = data.split
    lo, hi = (sp.train_end, sp.val_end) if split == "val" else (sp.val_end, len(data.scaled))
    t = np.arange(lo - 1, hi - 1)
    y = data.scaled
    return readout.mda(y[t + 1], np.full(len(t), y[: sp.train_end].mean()), y[t])


def synthetic_replicates(family: str, gate_count: int, n_qubits: int, n_sims: int,
                         scenario: str = "no_regressors", base_seed: int = 0,
                         length: int = dataio.FULL_LENGTH, **plan_kw) -> list[tuple[Dataset, RunOutput]]:
    """Run one reservoir per fresh synthetic series, ``n_sims`` times."""
    plan = SweepPlan(families=(family,), gate_counts=(gate_count,), n_sims=n_sims,
                     qubit_counts=(n_qubits,), scenario=scenario, base_seed=base_seed, **plan_kw)
    out = []
    for sim in range(n_sims):
        data = synthetic_dataset(series_seed(base_seed, sim), length)
        item = WorkItem(family, gate_count, n_qubits, sim, derive_seed(base_seed, family, gate_count, n_qubits, sim))
        out.append((data, run_single(item, plan, data)))
    return out
