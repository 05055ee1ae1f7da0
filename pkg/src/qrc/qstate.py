"""Dense pure and mixed states of a few qubits.

States are plain numpy arrays: a state vector has shape ``(2**n,)`` and a
density matrix ``(2**n, 2**n)``.  Qubit 0 is the leftmost tensor factor, i.e.
the most significant bit of a computational-basis index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qrc.errors import CapacityError, ContractError, DomainError

MAX_QUBITS = 10

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8
UNITARY_TOL = 1e-8

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliObservable:
    """A local ``X`` or ``Z`` operator on one qubit."""

    axis: str
    qubit: int

    def __post_init__(self):
        if self.axis not in ("X", "Z"):
            raise ContractError(f"Pauli axis must be 'X' or 'Z', got {self.axis!r}")
        if self.qubit < 0:
            raise ContractError(f"qubit index must be nonnegative, got {self.qubit}")


def n_qubits_of(a: np.ndarray) -> int:
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ContractError(f"dimension {dim} is not a power of two")
    return n


def pure_input_state(y: float, n: int) -> np.ndarray:
    """Encode a scalar ``y`` in [0, 1] as ``(sqrt(1-y)|0> + sqrt(y)|1>)^{⊗n}``."""
    if not 0.0 <= y <= 1.0 or not np.isfinite(y):
        raise DomainError(f"input value y={y!r} is outside [0, 1]")
    if n < 1:
        raise ContractError(f"number of input qubits must be >= 1, got {n}")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    single = np.array([np.sqrt(1.0 - y), np.sqrt(y)], dtype=complex)
    psi = single
    for _ in range(n - 1):
        psi = np.kron(psi, single)
    return psi


def basis_state(index: int, n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def density_from_pure(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > 1e-12:
        raise ContractError(f"state vector is not normalized (|psi|^2 = {norm!r})")
    return np.outer(psi, psi.conj())


def zero_state(n: int) -> np.ndarray:
    """Density matrix of ``|0...0>`` on ``n`` qubits."""
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(1 << n, dtype=complex) / (1 << n)


def partial_trace_first(rho: np.ndarray, k: int) -> np.ndarray:
    """Trace out qubits ``0..k-1`` and return the state of the remaining ones."""
    n = n_qubits_of(rho)
    if not 1 <= k < n:
        raise CapacityError(f"cannot trace out {k} of {n} qubits")
    dk, dr = 1 << k, 1 << (n - k)
    return np.einsum("ijik->jk", rho.reshape(dk, dr, dk, dr))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a`` on the leading (lower-index) qubits."""
    n = n_qubits_of(a) + n_qubits_of(b)
    if n > MAX_QUBITS:
        raise CapacityError(f"tensor product of {n} qubits exceeds the maximum of {MAX_QUBITS}")
    return np.kron(a, b)


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ContractError(f"unitary must be square, got shape {u.shape}")
    err = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if err > tol:
        raise ContractError(f"matrix is not unitary (max |UU^dag - I| = {err:.3e})")


def apply_unitary(rho: np.ndarray, u: np.ndarray, check: bool = True) -> np.ndarray:
    """Return ``U rho U^dag``."""
    if u.shape != rho.shape:
        raise ContractError(f"unitary shape {u.shape} does not match state shape {rho.shape}")
    if check:
        check_unitary(u)
    return u @ rho @ u.conj().T


def expval_pauli(rho: np.ndarray, obs: PauliObservable) -> float:
    """``Tr[P rho]`` for a single-qubit Pauli, by index-pair traversal."""
    n = n_qubits_of(rho)
    if obs.qubit >= n:
        raise ContractError(f"observable acts on qubit {obs.qubit} of a {n}-qubit state")
    mask = 1 << (n - 1 - obs.qubit)
    idx = np.arange(1 << n)
    if obs.axis == "Z":
        signs = np.where(idx & mask, -1.0, 1.0)
        return float(np.dot(signs, rho[idx, idx].real))
    return float(np.sum(rho[idx, idx ^ mask].real))


def local_expectations(rho: np.ndarray) -> np.ndarray:
    """All ``(<X_0>, <Z_0>, <X_1>, <Z_1>, ...)`` of a density matrix."""
    n = n_qubits_of(rho)
    idx = np.arange(1 << n)
    diag = rho[idx, idx].real
    out = np.empty(2 * n)
    for q in range(n):
        mask = 1 << (n - 1 - q)
        out[2 * q] = np.sum(rho[idx, idx ^ mask].real)
        out[2 * q + 1] = np.sum(np.where(idx & mask, -diag, diag))
    return out


def check_density(rho: np.ndarray, psd: bool = False) -> None:
    """Raise ``ContractError`` if ``rho`` is not a valid density matrix.

    The eigenvalue test is O(d^3) and only runs when ``psd`` is set.
    """
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITIAN_TOL:
        raise ContractError(f"density matrix is not Hermitian (max |rho - rho^dag| = {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ContractError(f"density matrix trace is {tr}, expected 1")
    if psd:
        lam = np.linalg.eigvalsh(rho).min()
        if lam < -PSD_TOL:
            raise ContractError(f"density matrix has negative eigenvalue {lam:.3e}")


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def pauli_string(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string such as ``"XIZ"`` (qubit 0 first)."""
    out = np.ones((1, 1), dtype=complex)
    for ch in label:
        out = np.kron(out, PAULI[ch])
    return out
