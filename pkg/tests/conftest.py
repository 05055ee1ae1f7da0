import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


def random_density(rng, n, rank=None):
    d = 1 << n
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(rng, d):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def brute_embed(small, qubits, n):
    """Dense embedding of a k-qubit matrix by explicit index enumeration."""
    d = 1 << n
    out = np.zeros((d, d), dtype=complex)
    for row, col in itertools.product(range(d), repeat=2):
        rb = [(row >> (n - 1 - q)) & 1 for q in range(n)]
        cb = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        if any(rb[q] != cb[q] for q in range(n) if q not in qubits):
            continue
        r = sum(rb[q] << (len(qubits) - 1 - i) for i, q in enumerate(qubits))
        c = sum(cb[q] << (len(qubits) - 1 - i) for i, q in enumerate(qubits))
        out[row, col] = small[r, c]
    return out


def brute_partial_trace(rho, k):
    n = rho.shape[0].bit_length() - 1
    dk, dr = 1 << k, 1 << (n - k)
    out = np.zeros((dr, dr), dtype=complex)
    for i in range(dr):
        for j in range(dr):
            for a in range(dk):
                out[i, j] += rho[a * dr + i, a * dr + j]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(criterion: int, ok: bool, detail: str) -> bool:
        line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
