import math

import numpy as np
import pytest

from conftest import random_density
from qrc import ising, qstate
from qrc.errors import ConfigurationError
from qrc.qstate import PauliObservable, expval_pauli


def series_expm(a, terms=30):
    """Scaling and squaring with a truncated Taylor series."""
    norm = np.max(np.sum(np.abs(a), axis=1))
    s = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    b = a / (1 << s)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def test_sample_default_knobs():
    spec = ising.sample_ising(7, Js=1.0, ratio=0.1, seed=4)
    assert spec.h == pytest.approx(0.1)
    pairs = list(spec.couplings())
    assert len(pairs) == 21
    assert all(abs(j) < 0.5 for _, _, j in pairs)
    np.testing.assert_array_equal(spec.J, spec.J.T)
    assert np.all(np.diag(spec.J) == 0)


def test_sample_is_deterministic():
    a, b = ising.sample_ising(5, seed=9), ising.sample_ising(5, seed=9)
    np.testing.assert_array_equal(a.J, b.J)


def test_sample_rejects_bad_scale():
    with pytest.raises(ConfigurationError):
        ising.sample_ising(3, Js=0.0)
    with pytest.raises(ConfigurationError):
        ising.sample_ising(3, ratio=-1)


def test_one_qubit_hamiltonian_is_field_only():
    spec = ising.sample_ising(1, Js=2.0, ratio=0.1, seed=0)
    np.testing.assert_allclose(ising.hamiltonian(spec), 0.2 * qstate.PAULI["X"])


def test_two_qubit_hamiltonian_expansion():
    spec = ising.sample_ising(2, seed=3)
    p = qstate.pauli_string
    expected = spec.J[0, 1] * p("ZZ") + spec.h * (p("XI") + p("IX"))
    np.testing.assert_allclose(ising.hamiltonian(spec), expected)


def test_coupling_statistics():
    vals = np.concatenate([[j for _, _, j in ising.sample_ising(5, Js=1.0, seed=s).couplings()]
                           for s in range(1000)])
    assert len(vals) == 10_000
    assert abs(vals.mean()) <= 0.01
    assert vals.min() > -0.5 and vals.max() < 0.5


def test_evolution_identity_at_zero():
    spec = ising.sample_ising(3, seed=1)
    np.testing.assert_allclose(ising.evolution_unitary(spec, 0.0), np.eye(8), atol=1e-14)


def test_single_qubit_precession():
    spec = ising.sample_ising(1, Js=1.0, ratio=0.1, seed=0)
    rho0 = qstate.zero_state(1)
    for t in (0.3, 2.0, 10.0, 37.5):
        rho = qstate.apply_unitary(rho0, ising.evolution_unitary(spec, t))
        assert abs(expval_pauli(rho, PauliObservable("Z", 0)) - math.cos(2 * 0.1 * t)) <= 1e-9


def test_diagonal_hamiltonian_keeps_populations():
    spec = ising.IsingSpec(2, np.array([[0.0, 0.37], [0.37, 0.0]]), 0.0)
    rho = qstate.apply_unitary(qstate.zero_state(2), ising.evolution_unitary(spec, 4.2))
    for q in range(2):
        assert abs(expval_pauli(rho, PauliObservable("X", q))) < 1e-12
        assert abs(expval_pauli(rho, PauliObservable("Z", q)) - 1) < 1e-12


def test_evolution_matches_series_exponential():
    for n in (1, 2, 3):
        for seed in range(3):
            spec = ising.sample_ising(n, seed=seed)
            for t in (0.5, 10.0):
                oracle = series_expm(-1j * ising.hamiltonian(spec) * t)
                assert np.max(np.abs(ising.evolution_unitary(spec, t) - oracle)) <= 1e-7


def test_evolution_group_property():
    spec = ising.sample_ising(4, seed=2)
    u = ising.evolution_unitary
    assert np.max(np.abs(u(spec, 1.3) @ u(spec, 2.1) - u(spec, 3.4))) <= 1e-8
    err = np.max(np.abs(u(spec, 10.0) @ u(spec, 10.0).conj().T - np.eye(16)))
    assert err <= 1e-9


@pytest.mark.parametrize("n_v", [1, 2, 5])
def test_intermediate_unitaries_compose(n_v):
    spec = ising.sample_ising(4, seed=6)
    us = ising.intermediate_unitaries(spec, 10.0, n_v)
    assert len(us) == n_v
    prod = np.eye(16, dtype=complex)
    for u in us:
        prod = u @ prod
    assert np.max(np.abs(prod - ising.evolution_unitary(spec, 10.0))) <= 1e-8


def test_energy_is_conserved(rng):
    spec = ising.sample_ising(3, seed=8)
    H = ising.hamiltonian(spec)
    rho = random_density(rng, 3)
    e0 = np.trace(H @ rho).real
    for t in (1.0, 5.0, 10.0):
        rho_t = qstate.apply_unitary(rho, ising.evolution_unitary(spec, t))
        assert abs(np.trace(H @ rho_t).real - e0) <= 1e-8


def test_g3_count_single_qubit():
    spec = ising.sample_ising(1, seed=0)
    eps = 1e-3
    assert ising.estimate_g3_count(spec, 10.0, trotter_steps=1, epsilon=eps) == 2 + ising.rz_cost(eps)
    assert ising.rz_cost(eps) == math.ceil(4 + 3 * math.log2(1000))


def test_g3_count_formula_linearity():
    spec = ising.sample_ising(7, seed=1)
    rot = 21 + 7
    for steps in (1, 4, 9):
        a = ising.estimate_g3_count(spec, 10.0, steps, 1e-3)
        b = ising.estimate_g3_count(spec, 10.0, steps, 5e-4)
        assert b - a == steps * rot * (ising.rz_cost(5e-4) - ising.rz_cost(1e-3))
        assert a == steps * rot * (2 + ising.rz_cost(1e-3))


def test_g3_count_default_steps_depend_on_spectrum():
    spec = ising.sample_ising(7, seed=3)
    lam = np.linalg.eigvalsh(ising.hamiltonian(spec))
    steps = ising.default_trotter_steps(spec)
    assert steps == math.ceil(10.0 * (lam[-1] - lam[0]) / (2 * math.pi))
    assert ising.estimate_g3_count(spec) == ising.estimate_g3_count(spec, 10.0, steps)


def test_g3_count_validation():
    spec = ising.sample_ising(2, seed=0)
    with pytest.raises(ConfigurationError):
        ising.estimate_g3_count(spec, trotter_steps=0)
    with pytest.raises(ConfigurationError):
        ising.estimate_g3_count(spec, epsilon=1.5)


def test_text_round_trip():
    spec = ising.sample_ising(4, seed=12)
    text = spec.to_text()
    assert text.startswith("ISING 4 12 ")
    back = ising.ising_from_text(text)
    np.testing.assert_array_equal(back.J, spec.J)
    assert back.h == spec.h and back.T == spec.T
