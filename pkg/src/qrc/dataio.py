"""Price series ingestion, scaling, splitting and synthetic data."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from qrc.errors import ConfigurationError, FormatError

DEFAULT_TRAIN = 356
DEFAULT_VAL = 53
DEFAULT_TEST = 62
FULL_LENGTH = DEFAULT_TRAIN + DEFAULT_VAL + DEFAULT_TEST
PROPORTIONS = (0.756, 0.113, 0.131)
MIN_LENGTH = 30


@dataclass(frozen=True)
class DailyRecord:
    date: dt.date
    price: float
    regressors: tuple[float, ...] = ()


@dataclass
class PriceSeries:
    """Weekly series; ``weeks`` are ISO ``(year, week)`` pairs."""

    weeks: list[tuple[int, int]]
    values: np.ndarray
    regressors: np.ndarray | None = None
    regressor_names: list[str] = field(default_factory=list)
    counts: np.ndarray | None = None
    filled: np.ndarray | None = None

    def __len__(self):
        return len(self.values)

    def week_labels(self) -> list[str]:
        return [f"{y}-W{w:02d}" for y, w in self.weeks]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["week", "price", *self.regressor_names])
            for i, label in enumerate(self.week_labels()):
                row = [label, f"{self.values[i]:.17g}"]
                if self.regressors is not None:
                    row += [f"{v:.17g}" for v in self.regressors[i]]
                w.writerow(row)


def load_daily_csv(path) -> tuple[list[DailyRecord], list[str]]:
    """Read ``date,price[,regressor...]`` rows; returns records and regressor names."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise FormatError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0].lower() != "date" or header[1].lower() != "price":
            raise FormatError(f"{path}: header must start with 'date,price', got {','.join(header)!r}")
        names = header[2:]
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(f"{path}: line {lineno}: expected {len(header)} columns, got {len(row)}")
            try:
                date = dt.date.fromisoformat(row[0].strip())
                price = float(row[1])
                regs = tuple(float(c) for c in row[2:])
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
            if not math.isfinite(price) or price < 0:
                raise FormatError(f"{path}: line {lineno}: price must be a finite nonnegative number")
            records.append(DailyRecord(date, price, regs))
    return records, names


def _next_week(year: int, week: int) -> tuple[int, int]:
    d = dt.date.fromisocalendar(year, week, 1) + dt.timedelta(days=7)
    iso = d.isocalendar()
    return iso[0], iso[1]


def aggregate_weekly(records, regressor_names=()) -> PriceSeries:
    """Average daily records per ISO week; empty weeks carry the previous mean forward."""
    if not records:
        raise ConfigurationError("no records to aggregate")
    k = len(records[0].regressors)
    buckets: dict[tuple[int, int], list[DailyRecord]] = {}
    for r in records:
        iso = r.date.isocalendar()
        buckets.setdefault((iso[0], iso[1]), []).append(r)
    first, last = min(buckets), max(buckets)
    weeks, values, regs, counts, filled = [], [], [], [], []
    wk = first
    while True:
        rows = buckets.get(wk)
        if rows:
            values.append(float(np.mean([r.price for r in rows])))
            regs.append(np.mean([r.regressors for r in rows], axis=0) if k else np.zeros(0))
            counts.append(len(rows))
            filled.append(False)
        else:
            values.append(values[-1])
            regs.append(regs[-1])
            counts.append(0)
            filled.append(True)
        weeks.append(wk)
        if wk == last:
            break
        wk = _next_week(*wk)
    return PriceSeries(
        weeks,
        np.array(values),
        np.array(regs) if k else None,
        list(regressor_names),
        np.array(counts),
        np.array(filled),
    )


@dataclass(frozen=True)
class Scaler:
    """Min-max map fit on the training rows."""

    min: float
    max: float

    def __post_init__(self):
        if not self.max > self.min:
            raise ConfigurationError(f"degenerate scaler range [{self.min}, {self.max}]")

    def apply(self, x):
        return (np.asarray(x, dtype=float) - self.min) / (self.max - self.min)

    def invert(self, z):
        return np.asarray(z, dtype=float) * (self.max - self.min) + self.min

    @property
    def range(self) -> float:
        return self.max - self.min


def clip_unit(z):
    return np.clip(z, 0.0, 1.0)


@dataclass(frozen=True)
class SplitSpec:
    train_end: int
    val_end: int
    length: int

    def __post_init__(self):
        if not 0 < self.train_end < self.val_end < self.length:
            raise ConfigurationError(f"invalid split {self.train_end}/{self.val_end}/{self.length}")


def fit_scaler(values, split: SplitSpec) -> Scaler:
    train = np.asarray(values, dtype=float)[: split.train_end]
    return Scaler(float(train.min()), float(train.max()))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_paper_default(length: int) -> SplitSpec:
    """356/53/rest for full-length series, otherwise a proportional split."""
    if length < MIN_LENGTH:
        raise ConfigurationError(f"series of length {length} is too short to split (need >= {MIN_LENGTH})")
    if length >= FULL_LENGTH:
        return SplitSpec(DEFAULT_TRAIN, DEFAULT_TRAIN + DEFAULT_VAL, length)
    train = _round_half_up(PROPORTIONS[0] * length)
    val = _round_half_up(PROPORTIONS[1] * length)
    return SplitSpec(train, train + val, length)


@dataclass(frozen=True)
class SyntheticRecipe:
    """Knobs of the synthetic weekly price generator.

    ``price = level + seasonal + x`` floored at ``floor``.  The deviation ``x``
    integrates weekly moves

        d_t = momentum d_{t-1} + echo d_{t-echo_lag} - reversion x_{t-1} + noise + jump

    i.e. an autoregressive move process with a delayed supply response, which
    makes moves several weeks back informative about the next direction.
    Regressor ``j`` is the price ``lead`` weeks ahead plus Gaussian noise with
    standard deviation ``regressor_noise * std(price) * (j + 1) / k``.
    """

    level: float = 0.8
    seasonal_amplitude: float = 0.3
    period: float = 52.18
    momentum: float = 0.0
    echo: float = 0.7
    echo_lag: int = 3
    reversion: float = 0.2
    noise: float = 0.02
    jump_prob: float = 0.05
    jump_scale: float = 0.2
    floor: float = 0.05
    n_regressors: int = 0
    lead: int = 1
    regressor_noise: float = 0.5


def synthesize_series(length: int, seed: int, recipe: SyntheticRecipe | None = None, start=(2013, 10)) -> PriceSeries:
    if length < MIN_LENGTH:
        raise ConfigurationError(f"synthetic series needs length >= {MIN_LENGTH}")
    recipe = recipe or SyntheticRecipe()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n = length + recipe.lead
    t = np.arange(n)
    seasonal = recipe.seasonal_amplitude * np.sin(2 * np.pi * t / recipe.period + rng.uniform(0, 2 * np.pi))
    eps = rng.standard_normal(n) * recipe.noise
    jumps = (rng.random(n) < recipe.jump_prob) * rng.normal(0.0, recipe.jump_scale, n)
    x = np.zeros(n)
    d = np.zeros(n)
    for i in range(1, n):
        echo = d[i - recipe.echo_lag] if i >= recipe.echo_lag else 0.0
        d[i] = recipe.momentum * d[i - 1] + recipe.echo * echo - recipe.reversion * x[i - 1] + eps[i] + jumps[i]
        x[i] = x[i - 1] + d[i]
    full = np.maximum(recipe.level + seasonal + x, recipe.floor)
    values = full[:length]
    weeks = [start]
    for _ in range(length - 1):
        weeks.append(_next_week(*weeks[-1]))
    regs = None
    names = []
    if recipe.n_regressors:
        spread = np.std(values)
        cols = []
        for j in range(recipe.n_regressors):
            sd = recipe.regressor_noise * spread * (j + 1) / recipe.n_regressors
            cols.append(full[recipe.lead : recipe.lead + length] + rng.normal(0.0, sd, length))
        regs = np.column_stack(cols)
        names = [f"ext{j}" for j in range(recipe.n_regressors)]
    return PriceSeries(weeks, values, regs, names, np.ones(length, dtype=int), np.zeros(length, dtype=bool))
