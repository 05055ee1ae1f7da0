"""Sequential reservoir dynamics: inject, evolve in segments, read out."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from qrc import gates, ising
from qrc.errors import AlignmentError, ConfigurationError, DomainError
from qrc.gates import Circuit
from qrc.ising import IsingSpec
from qrc.qstate import (
    check_unitary,
    local_expectations,
    partial_trace_first,
    pure_input_state,
    zero_state,
)

DEFAULT_WASHOUT = 10
DEFAULT_NV = 2


@dataclass(frozen=True)
class ReservoirConfig:
    n_qubits: int
    evolution: Union[Circuit, IsingSpec]
    input_qubits: int = 1
    n_v: int = DEFAULT_NV
    washout: int = DEFAULT_WASHOUT
    seed: int = 0

    def __post_init__(self):
        if not self.n_qubits > self.input_qubits >= 1:
            raise ConfigurationError(
                f"need n_qubits > input_qubits >= 1, got N={self.n_qubits}, n={self.input_qubits}"
            )
        if self.n_v < 1:
            raise ConfigurationError(f"n_v must be >= 1, got {self.n_v}")
        if self.washout < 0:
            raise ConfigurationError(f"washout must be >= 0, got {self.washout}")
        if self.evolution.n_qubits != self.n_qubits:
            raise ConfigurationError(
                f"evolution acts on {self.evolution.n_qubits} qubits, reservoir has {self.n_qubits}"
            )

    @property
    def n_features(self) -> int:
        return 2 * self.n_qubits * self.n_v


@dataclass
class FeatureMatrix:
    values: np.ndarray
    columns: list[str]
    # time index (into the input series) of each row
    times: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def shape(self):
        return self.values.shape

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.values:
                w.writerow([f"{v:.17g}" for v in row])


def feature_names(n_qubits: int, n_v: int) -> list[str]:
    return [f"seg{k}_q{i}_{ax}" for k in range(n_v) for i in range(n_qubits) for ax in "XZ"]


def segment_unitaries(config: ReservoirConfig) -> list[np.ndarray]:
    """One unitary per intermediate readout; their product is the full step."""
    if isinstance(config.evolution, IsingSpec):
        us = ising.intermediate_unitaries(config.evolution, config.evolution.T, config.n_v)
    else:
        us = [gates.compile(c) for c in gates.segment(config.evolution, config.n_v)]
    for u in us:
        check_unitary(u)
    return us


def init_state(config: ReservoirConfig) -> np.ndarray:
    return zero_state(config.n_qubits)


def inject(rho_prev: np.ndarray, y: float, n_input: int) -> np.ndarray:
    """Replace the input qubits by a fresh encoding of ``y``, keep the rest."""
    psi = pure_input_state(y, n_input)
    return np.kron(np.outer(psi, psi.conj()), partial_trace_first(rho_prev, n_input))


def step(rho_prev: np.ndarray, y: float, config: ReservoirConfig, seg_unitaries) -> tuple[np.ndarray, np.ndarray]:
    """Advance one input step; returns the new state and its ``2 N n_v`` features."""
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"input value y={y!r} is outside [0, 1]; scale the series first")
    rho = inject(rho_prev, y, config.input_qubits)
    feats = []
    for u in seg_unitaries:
        rho = u @ rho @ u.conj().T
        feats.append(local_expectations(rho))
    return rho, np.concatenate(feats)


def run_series(series, config: ReservoirConfig, regressors=None, regressor_names=None, seg_unitaries=None) -> FeatureMatrix:
    """Feed the whole series through the reservoir from ``|0...0>``.

    Row ``r`` holds the features after ingesting ``series[washout + r]``.
    """
    series = np.asarray(series, dtype=float)
    if regressors is not None:
        regressors = np.asarray(regressors, dtype=float)
        if regressors.ndim == 1:
            regressors = regressors[:, None]
        if len(regressors) != len(series):
            raise AlignmentError(
                f"regressors have {len(regressors)} rows but the series has {len(series)} steps"
            )
    if seg_unitaries is None:
        seg_unitaries = segment_unitaries(config)
    rho = init_state(config)
    out = np.empty((len(series), config.n_features))
    for t, y in enumerate(series):
        rho, out[t] = step(rho, float(y), config, seg_unitaries)
    kept = slice(config.washout, None)
    values = out[kept]
    columns = feature_names(config.n_qubits, config.n_v)
    if regressors is not None:
        values = np.hstack([values, regressors[kept]])
        if regressor_names is None:
            regressor_names = [f"reg{j}" for j in range(regressors.shape[1])]
        columns = columns + list(regressor_names)
    return FeatureMatrix(values, columns, np.arange(len(series))[kept])
