import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from dwentangle.dynamics import Propagator, check_state, expectation_sz, initial_state_LR
from dwentangle.entanglement import concurrence_pure, effective_propagator
from dwentangle.model import ModelParams, build_effective_hamiltonian, closed_form_eigensystem

BASE = ModelParams(1.0, 20.0, 20.0, 20.0)
S2 = 1 / math.sqrt(2)


def random_state(rng, dim=4):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def test_initial_state():
    np.testing.assert_array_equal(initial_state_LR(), [0, 1, 0, 0])
    assert concurrence_pure(initial_state_LR()) == 0.0


def test_initial_overlaps_with_closed_form_vectors():
    h = build_effective_hamiltonian(BASE)
    eig = closed_form_eigensystem(h)
    singlet = eig.vectors[:, np.argmin(np.abs(eig.values - h.k2))]
    phi4 = eig.vectors[:, np.argmin(np.abs(eig.values - h.k1))]
    assert np.vdot(singlet, initial_state_LR()) == pytest.approx(-S2, abs=1e-15)
    assert abs(np.vdot(phi4, initial_state_LR())) < 1e-15


def test_identity_at_time_zero():
    prop = effective_propagator(BASE)
    psi = random_state(np.random.default_rng(0))
    np.testing.assert_allclose(prop.evolve(psi, 0.0), psi, atol=1e-12)


def test_no_tunneling_only_adds_phase():
    p = ModelParams(0.0, 20.0, 20.0, 20.0)
    prop = effective_propagator(p)
    k2 = build_effective_hamiltonian(p).k2
    for t in (0.3, 17.0, 444.4):
        psi = prop.evolve(initial_state_LR(), t)
        np.testing.assert_allclose(psi, np.exp(-1j * k2 * t) * initial_state_LR(), atol=1e-12)


def test_ten_pi_matches_dense_exponential():
    t = 10 * math.pi
    psi = effective_propagator(BASE).evolve(initial_state_LR(), t)
    ref = expm(-1j * t * build_effective_hamiltonian(BASE).matrix) @ initial_state_LR()
    np.testing.assert_allclose(psi, ref, atol=1e-10)
    assert abs(psi[0] - psi[3]) < 1e-12
    assert concurrence_pure(psi) >= 0.95


def test_array_times_match_scalar_calls():
    prop = effective_propagator(BASE)
    ts = np.array([0.0, 1.5, 31.4, 900.0])
    stack = prop.evolve(initial_state_LR(), ts)
    assert stack.shape == (4, 4)
    for t, row in zip(ts, stack):
        np.testing.assert_allclose(row, prop.evolve(initial_state_LR(), t), atol=1e-13)


def test_rejects_bad_states():
    prop = effective_propagator(BASE)
    with pytest.raises(ValueError, match="dimension"):
        prop.evolve(np.array([1.0, 0, 0]), 1.0)
    with pytest.raises(ValueError, match="normalized"):
        prop.evolve(np.array([1.0, 1.0, 0, 0]), 1.0)
    with pytest.raises(ValueError):
        check_state(np.eye(2))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1000), st.floats(0, 1000))
def test_unitarity_and_group_law(seed, t1, t2):
    rng = np.random.default_rng(seed)
    p = ModelParams(*rng.uniform(0, 3, size=1), *rng.uniform(-30, 30, size=3))
    prop = effective_propagator(p)
    psi = random_state(rng)
    a = prop.evolve(psi, t1)
    assert abs(np.linalg.norm(a) - 1) < 1e-12
    np.testing.assert_allclose(prop.evolve(a, t2), prop.evolve(psi, t1 + t2), atol=1e-10)
    assert prop.energy(a) == pytest.approx(prop.energy(psi), abs=1e-10 * max(1, abs(prop.energy(psi))))


def test_numeric_propagator_agrees_with_closed_form():
    h = build_effective_hamiltonian(BASE).matrix
    ts = np.linspace(0, 500, 77)
    a = Propagator.from_matrix(h).evolve(initial_state_LR(), ts)
    b = effective_propagator(BASE).evolve(initial_state_LR(), ts)
    np.testing.assert_allclose(a, b, atol=1e-9)


@pytest.mark.parametrize("p", [BASE, ModelParams(1.5, 20, 20, 20), ModelParams(0.7, 3.0, 11.0, -4.0)])
def test_symmetry_lock(p):
    ts = np.linspace(0, 1000, 2001)
    psi = effective_propagator(p).evolve(initial_state_LR(), ts)
    assert np.abs(psi[:, 0] - psi[:, 3]).max() < 1e-10


def test_expectation_sz_examples():
    lr = initial_state_LR()
    assert expectation_sz(lr, "A") == 0.5
    assert expectation_sz(lr, "B") == -0.5
    singlet = np.array([0, -S2, S2, 0])
    bell = np.array([S2, 0, 0, S2])
    for psi in (singlet, bell):
        assert expectation_sz(psi, "A") == pytest.approx(0, abs=1e-15)
        assert expectation_sz(psi, "B") == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError, match="dimension"):
        expectation_sz(np.ones(3) / math.sqrt(3), "A")


def test_expectation_sz_bounds_along_trace():
    psi = effective_propagator(BASE).evolve(initial_state_LR(), np.linspace(0, 200, 401))
    sz = expectation_sz(psi, "A")
    assert sz.shape == (401,)
    assert np.all(np.abs(sz) <= 0.5 + 1e-12)
