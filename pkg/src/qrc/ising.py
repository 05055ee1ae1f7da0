"""Random transverse-field Ising reservoirs.

``H = sum_{i<j} J_ij Z_i Z_j + h sum_i X_i`` with ``J_ij ~ U(-Js/2, Js/2)``
on every pair and ``h = ratio * Js``; units with hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qrc.errors import ConfigurationError, FormatError
from qrc.qstate import MAX_QUBITS

DEFAULT_JS = 1.0
DEFAULT_RATIO = 0.1
DEFAULT_TIME = 10.0
DEFAULT_EPSILON = 1e-3
RZ_C0 = 4.0
RZ_C1 = 3.0


@dataclass(frozen=True, eq=False)
class IsingSpec:
    n_qubits: int
    J: np.ndarray
    h: float
    Js: float = DEFAULT_JS
    ratio: float = DEFAULT_RATIO
    T: float = DEFAULT_TIME
    seed: int = 0
    _eig: list = field(default_factory=list, repr=False, compare=False)

    def couplings(self):
        """Yield ``(i, j, J_ij)`` for every pair ``i < j``."""
        for i in range(self.n_qubits):
            for j in range(i + 1, self.n_qubits):
                yield i, j, float(self.J[i, j])

    def eigh(self):
        # cached: evolution_unitary is called once per intermediate step
        if not self._eig:
            self._eig.append(np.linalg.eigh(hamiltonian(self)))
        return self._eig[0]

    def to_text(self) -> str:
        lines = [f"ISING {self.n_qubits} {self.seed} {self.Js:.17g} {self.ratio:.17g} {self.T:.17g}"]
        for row in self.J:
            lines.append(" ".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"


def ising_from_text(text: str) -> IsingSpec:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        tag, n, seed, js, ratio, t = rows[0]
        if tag != "ISING":
            raise ValueError(f"expected ISING header, got {tag!r}")
        n = int(n)
        J = np.array([[float(v) for v in r] for r in rows[1 : n + 1]])
        if J.shape != (n, n):
            raise ValueError(f"coupling matrix has shape {J.shape}")
    except ValueError as exc:
        raise FormatError(f"malformed Ising text: {exc}") from exc
    return IsingSpec(n, J, float(ratio) * float(js), float(js), float(ratio), float(t), int(seed))


def sample_ising(
    n_qubits: int,
    Js: float = DEFAULT_JS,
    ratio: float = DEFAULT_RATIO,
    seed: int = 0,
    T: float = DEFAULT_TIME,
) -> IsingSpec:
    if Js <= 0:
        raise ConfigurationError(f"coupling scale Js must be positive, got {Js}")
    if ratio <= 0:
        raise ConfigurationError(f"field ratio h/Js must be positive, got {ratio}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"unsupported number of qubits {n_qubits}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    iu = np.triu_indices(n_qubits, k=1)
    J = np.zeros((n_qubits, n_qubits))
    J[iu] = rng.uniform(-Js / 2, Js / 2, size=len(iu[0]))
    J = J + J.T
    return IsingSpec(n_qubits, J, ratio * Js, Js, ratio, T, seed)


def hamiltonian(spec: IsingSpec) -> np.ndarray:
    n = spec.n_qubits
    idx = np.arange(1 << n)
    # z[q] = +1 / -1 eigenvalue of Z_q on each basis state
    z = np.array([1 - 2 * ((idx >> (n - 1 - q)) & 1) for q in range(n)], dtype=float)
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    diag = np.zeros(1 << n)
    for i, j, jij in spec.couplings():
        diag += jij * z[i] * z[j]
    H[idx, idx] = diag
    for q in range(n):
        H[idx, idx ^ (1 << (n - 1 - q))] += spec.h
    return H


def evolution_unitary(spec: IsingSpec, t: float) -> np.ndarray:
    """``exp(-i H t)`` from the Hermitian eigendecomposition of ``H``."""
    if t < 0:
        raise ConfigurationError(f"evolution time must be >= 0, got {t}")
    lam, v = spec.eigh()
    return (v * np.exp(-1j * lam * t)) @ v.conj().T


def intermediate_unitaries(spec: IsingSpec, T: float | None = None, n_v: int = 1) -> list[np.ndarray]:
    if n_v < 1:
        raise ConfigurationError(f"number of intermediate steps must be >= 1, got {n_v}")
    T = spec.T if T is None else T
    u = evolution_unitary(spec, T / n_v)
    return [u] * n_v


def rz_cost(epsilon: float, c0: float = RZ_C0, c1: float = RZ_C1) -> int:
    """H/T gates for one z-rotation to precision ``epsilon``."""
    return math.ceil(c0 + c1 * math.log2(1.0 / epsilon))


def default_trotter_steps(spec: IsingSpec, T: float | None = None) -> int:
    """Fewest steps whose relative eigenphases stay below 2pi, so no step aliases."""
    T = spec.T if T is None else T
    lam, _ = spec.eigh()
    return max(1, math.ceil(T * float(lam[-1] - lam[0]) / (2 * math.pi)))


def estimate_g3_count(
    spec: IsingSpec,
    T: float | None = None,
    trotter_steps: int | None = None,
    epsilon: float = DEFAULT_EPSILON,
    c0: float = RZ_C0,
    c1: float = RZ_C1,
) -> int:
    """Count {CNOT, H, T} gates of a first-order Trotter circuit for ``exp(-iHT)``.

    Each ``exp(-i theta Z_i Z_j)`` costs CNOT.Rz.CNOT and each
    ``exp(-i theta X_i)`` costs H.Rz.H, with ``rz_cost(epsilon)`` gates per Rz.
    """
    if trotter_steps is None:
        trotter_steps = default_trotter_steps(spec, T)
    if trotter_steps < 1:
        raise ConfigurationError(f"trotter_steps must be >= 1, got {trotter_steps}")
    if not 0 < epsilon < 1:
        raise ConfigurationError(f"epsilon must lie in (0, 1), got {epsilon}")
    rz = rz_cost(epsilon, c0, c1)
    n_zz = sum(1 for _, _, jij in spec.couplings() if jij != 0.0)
    n_x = spec.n_qubits if spec.h != 0.0 else 0
    return trotter_steps * ((n_zz + n_x) * (2 + rz))
