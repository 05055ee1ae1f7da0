"""Gates, random circuit families and circuit compilation.

Families
--------
``G1``  random gates from {CNOT, H, X}
``G2``  random gates from {CNOT, H, S}
``G3``  random gates from {CNOT, H, T}
``MG``  random matchgates G(A, B) with Haar A, B and det A = det B
``D2``, ``D3``, ``DN``  a Hadamard layer, one random diagonal gate on every
        k-subset of qubits (k = 2, 3, N) in shuffled order, a Hadamard layer

Randomness is drawn from ``numpy.random.SeedSequence(seed, spawn_key=(i,))``,
one child stream per sampled gate, so appending gates leaves earlier draws
untouched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from qrc.errors import CapacityError, ConfigurationError, ContractError, FormatError
from qrc.qstate import MAX_QUBITS, PAULI

FAMILIES = ("G1", "G2", "G3", "MG", "D2", "D3", "DN")
GENERATORS = {
    "G1": ("CNOT", "H", "X"),
    "G2": ("CNOT", "H", "S"),
    "G3": ("CNOT", "H", "T"),
}
DIAGONAL_ORDER = {"D2": 2, "D3": 3}
KINDS = ("H", "X", "S", "T", "CNOT", "MATCHGATE", "DIAGONAL")

TWO_PI = 2.0 * np.pi

_SQ2 = 1.0 / np.sqrt(2.0)
FIXED_MATRICES = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": PAULI["X"],
    "S": np.diag([1.0, 1j]),
    "T": np.diag([1.0, np.exp(1j * np.pi / 4)]),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}
_ARITY = {"H": 1, "X": 1, "S": 1, "T": 1, "CNOT": 2, "MATCHGATE": 2}


@dataclass(frozen=True)
class Gate:
    """One gate acting on ``qubits`` (the first listed qubit is the most significant).

    ``params`` holds the flattened entries ``(a1, a2, a3, a4, b1, b2, b3, b4)``
    for a matchgate and the phases ``phi_1 .. phi_{2^k}`` for a diagonal gate.
    """

    kind: str
    qubits: tuple[int, ...]
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ContractError(f"gate {self.kind} has repeated qubits {self.qubits}")
        if self.kind in _ARITY and len(self.qubits) != _ARITY[self.kind]:
            raise ContractError(f"{self.kind} acts on {_ARITY[self.kind]} qubits, got {self.qubits}")
        if self.kind == "DIAGONAL":
            if len(self.params) != 1 << len(self.qubits):
                raise ContractError("diagonal gate needs 2^k phases")
            if any(not 0.0 <= p < TWO_PI for p in self.params):
                raise ContractError("diagonal phases must lie in [0, 2pi)")

    def matrix(self) -> np.ndarray:
        if self.kind in FIXED_MATRICES:
            return FIXED_MATRICES[self.kind]
        if self.kind == "MATCHGATE":
            p = self.params
            return matchgate_matrix(np.reshape(p[:4], (2, 2)), np.reshape(p[4:], (2, 2)))
        return np.diag(np.exp(1j * np.asarray(self.params)))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    family: str
    gates: tuple[Gate, ...] = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self):
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ContractError(f"gate {g.kind} on {g.qubits} outside {self.n_qubits} qubits")
            if not _kind_allowed(self.family, g.kind):
                raise ContractError(f"gate {g.kind} is not in family {self.family}")

    def __len__(self):
        return len(self.gates)

    @property
    def gate_count(self) -> int:
        """Reported size: all gates, or only the diagonal gates for diagonal families."""
        if self.family in ("D2", "D3", "DN"):
            return sum(g.kind == "DIAGONAL" for g in self.gates)
        return len(self.gates)

    def to_text(self) -> str:
        lines = [f"{self.family} {self.n_qubits} {self.seed}"]
        for g in self.gates:
            line = f"{g.kind} {','.join(map(str, g.qubits))}"
            if g.params:
                flat = []
                for p in g.params:
                    if isinstance(p, complex):
                        flat += [p.real, p.imag]
                    else:
                        flat.append(p)
                line += " " + ",".join(f"{v:.17g}" for v in flat)
            lines.append(line)
        return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    try:
        family, n, seed = rows[0].split()
        gates = []
        for ln in rows[1:]:
            parts = ln.split()
            kind = parts[0]
            qubits = tuple(int(q) for q in parts[1].split(","))
            vals = [float(v) for v in parts[2].split(",")] if len(parts) > 2 else []
            if kind == "MATCHGATE":
                params = tuple(complex(vals[i], vals[i + 1]) for i in range(0, 16, 2))
            else:
                params = tuple(vals)
            gates.append(Gate(kind, qubits, params))
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed circuit text: {exc}") from exc
    return Circuit(int(n), family, tuple(gates), int(seed))


def _kind_allowed(family: str, kind: str) -> bool:
    if family in GENERATORS:
        return kind in GENERATORS[family]
    if family == "MG":
        return kind == "MATCHGATE"
    if family in ("D2", "D3", "DN"):
        return kind in ("DIAGONAL", "H")
    raise ConfigurationError(f"unknown circuit family {family!r}")


def gate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent child stream ``index`` of the circuit seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def haar_u2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary via phase-corrected QR of a Ginibre matrix."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def matchgate_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Embed A on span{|00>,|11>} and B on span{|01>,|10>}."""
    g = np.zeros((4, 4), dtype=complex)
    g[np.ix_([0, 3], [0, 3])] = a
    g[np.ix_([1, 2], [1, 2])] = b
    return g


def matchgate(a: np.ndarray, b: np.ndarray, q1: int, q2: int, tol: float = 1e-10) -> Gate:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for name, m in (("A", a), ("B", b)):
        if np.max(np.abs(m @ m.conj().T - np.eye(2))) > tol:
            raise ContractError(f"matchgate block {name} is not unitary")
    mismatch = abs(np.linalg.det(a) - np.linalg.det(b))
    if mismatch > tol:
        raise ContractError(f"matchgate blocks have different determinants (|detA - detB| = {mismatch:.3e})")
    params = tuple(complex(v) for v in np.concatenate([a.ravel(), b.ravel()]))
    return Gate("MATCHGATE", (q1, q2), params)


def random_matchgate(rng: np.random.Generator, n_qubits: int) -> Gate:
    pairs = list(itertools.combinations(range(n_qubits), 2))
    q1, q2 = pairs[rng.integers(len(pairs))]
    a = haar_u2(rng)
    b = haar_u2(rng)
    delta = np.angle(np.linalg.det(a)) - np.angle(np.linalg.det(b))
    b = b * np.exp(1j * delta / 2)
    return matchgate(a, b, q1, q2)


def _random_generator_gate(rng: np.random.Generator, family: str, n_qubits: int) -> Gate:
    kind = GENERATORS[family][rng.integers(3)]
    if kind == "CNOT":
        control = int(rng.integers(n_qubits))
        target = int(rng.integers(n_qubits - 1))
        if target >= control:
            target += 1
        return Gate("CNOT", (control, target))
    return Gate(kind, (int(rng.integers(n_qubits)),))


def _random_phases(rng: np.random.Generator, k: int) -> tuple[float, ...]:
    # uniform(0, 2pi) can round up to 2pi in floating point, fold it back
    return tuple(float(p) % TWO_PI for p in rng.uniform(0.0, TWO_PI, size=1 << k))


def sample_circuit(family: str, n_qubits: int, n_gates: int, seed: int) -> Circuit:
    """Draw a random circuit; deterministic in ``(family, n_qubits, n_gates, seed)``.

    ``n_gates`` is ignored for the diagonal families, whose structure is fixed.
    """
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown circuit family {family!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"unsupported number of qubits {n_qubits}")
    if n_gates < 0:
        raise ConfigurationError(f"number of gates must be >= 0, got {n_gates}")
    min_qubits = {"D3": 3}.get(family, 2)
    if family != "DN" and n_qubits < min_qubits:
        raise ConfigurationError(f"family {family} needs at least {min_qubits} qubits, got {n_qubits}")

    if family in GENERATORS:
        gates = [_random_generator_gate(gate_rng(seed, i), family, n_qubits) for i in range(n_gates)]
    elif family == "MG":
        gates = [random_matchgate(gate_rng(seed, i), n_qubits) for i in range(n_gates)]
    else:
        k = DIAGONAL_ORDER.get(family, n_qubits)
        subsets = list(itertools.combinations(range(n_qubits), k))
        # stream 0 orders the subsets, stream j + 1 draws the phases of subset j
        order = gate_rng(seed, 0).permutation(len(subsets))
        hadamards = [Gate("H", (q,)) for q in range(n_qubits)]
        diagonals = [
            Gate("DIAGONAL", subsets[j], _random_phases(gate_rng(seed, int(j) + 1), k))
            for j in order
        ]
        gates = hadamards + diagonals + hadamards
    return Circuit(n_qubits, family, tuple(gates), seed)


def apply_gate(m: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    """Left-multiply ``m`` (shape ``(2**n, cols)``) by the embedded gate."""
    k = len(gate.qubits)
    cols = m.shape[1]
    t = np.moveaxis(m.reshape([2] * n_qubits + [cols]), gate.qubits, range(k))
    shape = t.shape
    t = gate.matrix() @ t.reshape(1 << k, -1)
    t = np.moveaxis(t.reshape(shape), range(k), gate.qubits)
    return t.reshape(1 << n_qubits, cols)


def embed(gate: Gate, n_qubits: int) -> np.ndarray:
    return apply_gate(np.eye(1 << n_qubits, dtype=complex), gate, n_qubits)


def compile_gates(gates, n_qubits: int) -> np.ndarray:
    u = np.eye(1 << n_qubits, dtype=complex)
    for g in gates:
        u = apply_gate(u, g, n_qubits)
    return u


def compile(circuit: Circuit) -> np.ndarray:
    """Unitary of the circuit, gates applied in list order."""
    return compile_gates(circuit.gates, circuit.n_qubits)


def segment(circuit: Circuit, n_segments: int) -> list[Circuit]:
    """Split into ``n_segments`` consecutive pieces; earlier pieces take the extra gates."""
    if n_segments < 1:
        raise ConfigurationError(f"number of segments must be >= 1, got {n_segments}")
    base, extra = divmod(len(circuit.gates), n_segments)
    out, start = [], 0
    for i in range(n_segments):
        stop = start + base + (i < extra)
        out.append(Circuit(circuit.n_qubits, circuit.family, circuit.gates[start:stop], circuit.seed))
        start = stop
    return out


def pauli_basis(n_qubits: int) -> tuple[list[str], np.ndarray]:
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=n_qubits)]
    mats = np.empty((len(labels), 1 << n_qubits, 1 << n_qubits), dtype=complex)
    for i, lab in enumerate(labels):
        m = np.ones((1, 1), dtype=complex)
        for ch in lab:
            m = np.kron(m, PAULI[ch])
        mats[i] = m
    return labels, mats


def pauli_coefficients(op: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Coefficients ``c_Q = Tr(Q op) / 2^N`` of ``op`` in the Pauli basis."""
    return np.einsum("qij,ji->q", basis, op) / op.shape[0]


def is_pauli_conjugation_closed(circuit: Circuit, trials: int, seed: int = 0, tol: float = 1e-8) -> bool:
    """Check that ``U P U^dag`` is a single Pauli string for ``trials`` random ``P``."""
    if circuit.n_qubits > 4:
        raise CapacityError("Pauli-basis expansion is limited to 4 qubits")
    _, basis = pauli_basis(circuit.n_qubits)
    u = compile(circuit)
    rng = np.random.default_rng(seed)
    # index 0 is the identity string, which every unitary fixes
    for q in rng.integers(1, len(basis), size=trials):
        mag = np.abs(pauli_coefficients(u @ basis[q] @ u.conj().T, basis))
        big = mag > tol
        if big.sum() != 1 or abs(mag[big][0] - 1.0) > tol:
            return False
    return True
