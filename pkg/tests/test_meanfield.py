import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwentangle.meanfield import (
    MeanFieldParams,
    MeanFieldState,
    SingularityError,
    classical_energy,
    default_initial_state,
    equations_of_motion,
    integrate,
    oscillation_period,
    time_reversal_error,
)
from dwentangle.model import ModelParams

BASE = ModelParams(1.0, 20.0, 20.0, 20.0)


def test_energy_examples():
    p = MeanFieldParams(ModelParams(1, 0, 0, 0), 2, 2)
    assert classical_energy(p, MeanFieldState(0, 0, 0, 0)) == pytest.approx(2.0, abs=1e-14)
    p = MeanFieldParams(ModelParams(0, 20, 20, 20), 3, 3)
    assert classical_energy(p, MeanFieldState(1, -1, 0.3, 2.0)) == pytest.approx(180.0, abs=1e-12)


def test_energy_at_full_imbalance_drops_tunneling():
    p = MeanFieldParams(ModelParams(1, 0, 0, 0), 4, 2)
    assert classical_energy(p, MeanFieldState(2, 0, 0, 0)) == pytest.approx(1.0, abs=1e-15)


def test_energy_rejects_out_of_range():
    with pytest.raises(ValueError, match="exceeds"):
        classical_energy(MeanFieldParams(BASE, 2, 2), MeanFieldState(1.5, 0, 0, 0))


def test_params_need_positive_counts():
    with pytest.raises(ValueError):
        MeanFieldParams(BASE, 0, 3)


def test_eom_zero_phase():
    p = MeanFieldParams(ModelParams(1.3, 4.0, 6.0, 2.0), 5, 7)
    na, nb = 1.2, -2.1
    d = equations_of_motion(p, MeanFieldState(na, nb, 0, 0))
    assert d[0] == 0 and d[1] == 0
    assert d[2] == pytest.approx(-2 * 1.3 * na / math.sqrt(25 - 4 * na**2) + 2 * 6.0 * na + 2 * 4.0 * nb, rel=1e-14)
    assert d[3] == pytest.approx(-2 * 1.3 * nb / math.sqrt(49 - 4 * nb**2) + 2 * 2.0 * nb + 2 * 4.0 * na, rel=1e-14)


def test_eom_quarter_phase():
    p = MeanFieldParams(BASE, 3, 5)
    d = equations_of_motion(p, MeanFieldState(0, 0, math.pi / 2, math.pi / 2))
    np.testing.assert_allclose(d, [1.5, 2.5, 0, 0], atol=1e-15)


def test_eom_singularity():
    p = MeanFieldParams(BASE, 3, 3)
    with pytest.raises(SingularityError):
        equations_of_motion(p, MeanFieldState(1.5, 0, 0, 0))


def test_integration_reports_singularity_time():
    # pure Rabi from the boundary-adjacent state with theta=pi/2 runs into the
    # opposite boundary at t = pi/2
    p = MeanFieldParams(ModelParams(1, 0, 0, 0), 2, 2)
    with pytest.raises(SingularityError) as info:
        integrate(p, MeanFieldState(0.0, 0.0, math.pi / 2, math.pi / 2), 3.0, 1e-3)
    assert 1.4 < info.value.t < 1.6


def test_no_tunneling_freezes_pods():
    p = MeanFieldParams(ModelParams(0, 20, 20, 20), 3, 3)
    tr = integrate(p, MeanFieldState(0.7, -0.2, 0.1, 0.4), 2.0, 1e-3, record_every=50)
    assert np.all(tr.n_a == 0.7) and np.all(tr.n_b == -0.2)
    rate = 2 * 20 * 0.7 + 2 * 20 * -0.2
    np.testing.assert_allclose(tr.theta_a, 0.1 + rate * tr.t, rtol=1e-12)


def test_symmetric_swap():
    p = MeanFieldParams(ModelParams(1.0, 5.0, 20.0, 20.0), 4, 4)
    tr = integrate(p, MeanFieldState(1.3, -1.3, 0, 0), 10.0, 1e-4, record_every=100)
    assert np.abs(tr.n_b + tr.n_a).max() < 1e-8


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_rabi_oracle(omega):
    p = MeanFieldParams(ModelParams(omega, 0, 0, 0), 6, 6)
    tr = integrate(p, MeanFieldState(1.7, -0.4, 0, 0), 10.0, 1e-3, record_every=10)
    np.testing.assert_allclose(tr.n_a, 1.7 * np.cos(omega * tr.t), atol=1e-9)
    np.testing.assert_allclose(tr.n_b, -0.4 * np.cos(omega * tr.t), atol=1e-9)


def test_omega_scaling():
    s0 = MeanFieldState(1.1, 0.5, 0.3, -0.2)
    a = integrate(MeanFieldParams(ModelParams(1.0, 0, 0, 0), 3, 3), s0, 8.0, 1e-3, record_every=20)
    b = integrate(MeanFieldParams(ModelParams(2.0, 0, 0, 0), 3, 3), s0, 4.0, 5e-4, record_every=20)
    np.testing.assert_allclose(a.n_a, b.n_a, atol=1e-9)
    np.testing.assert_allclose(a.n_b, b.n_b, atol=1e-9)


interior = st.tuples(
    st.floats(1, 10), st.floats(1, 10),
    st.floats(-0.9, 0.9), st.floats(-0.9, 0.9),
    st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi),
)


@settings(max_examples=5, deadline=None)
@given(interior)
def test_energy_conservation_and_bounds(args):
    na, nb, fa, fb, ta, tb = args
    p = MeanFieldParams(BASE, na, nb)
    tr = integrate(p, MeanFieldState(fa * na / 2, fb * nb / 2, ta, tb), 2.0, 1e-4, record_every=100)
    assert tr.relative_drift.max() < 1e-8
    assert np.all(np.abs(2 * tr.n_a) <= na) and np.all(np.abs(2 * tr.n_b) <= nb)
    assert np.all(np.diff(tr.t) > 0)


def test_time_reversal():
    p = MeanFieldParams(BASE, 4, 6)
    assert time_reversal_error(p, MeanFieldState(0.8, -1.5, 0.4, 1.0), 2.0, 1e-4) < 1e-6


def test_batched_integration_matches_single():
    na = np.array([3.0, 5.0])
    nb = np.array([4.0, 2.0])
    s = np.array([[0.5, -1.0], [1.2, 0.3], [0.1, 2.0], [-0.4, 0.0]])
    batch = integrate(MeanFieldParams(BASE, na, nb), s, 0.5, 1e-4, record_every=1000)
    for j in range(2):
        one = integrate(MeanFieldParams(BASE, na[j], nb[j]), s[:, j], 0.5, 1e-4, record_every=1000)
        np.testing.assert_allclose(batch.n_a[:, j], one.n_a, atol=1e-13)
        np.testing.assert_allclose(batch.energy[:, j], one.energy, rtol=1e-13)


def test_last_step_lands_on_t_end():
    tr = integrate(MeanFieldParams(BASE, 3, 3), MeanFieldState(0.2, 0.1, 0, 0), 0.01234, 1e-3)
    assert tr.t[-1] == pytest.approx(0.01234, abs=1e-15)
    assert len(tr.t) == 14


def test_phase_step_warning(caplog):
    p = MeanFieldParams(BASE, 9, 9)
    with caplog.at_level(logging.WARNING):
        tr = integrate(p, MeanFieldState(4.4, 4.4, 0, 0), 0.02, 1e-3)
    assert tr.warnings and "phase advance" in tr.warnings[0]


def test_samples_are_states():
    tr = integrate(MeanFieldParams(BASE, 3, 3), MeanFieldState(0.2, 0.1, 0, 0), 0.01, 1e-3, record_every=5)
    states = list(tr.samples())
    assert len(states) == len(tr) == 3
    assert isinstance(states[-1], MeanFieldState) and states[-1].t == pytest.approx(0.01)


def test_default_start_locks_into_rabi_motion():
    # with kappa_A = kappa_B = kappa and N_A = N_B the default start lies on the
    # invariant manifold n_B = -n_A, theta_B = -theta_A, where the interaction
    # terms in the phase equations cancel: n_A(t) = n_A(0) cos(omega t) for any N
    for n in (3, 5, 9):
        p = MeanFieldParams(BASE, n, n)
        s0 = default_initial_state(p)
        tr = integrate(p, s0, 14.0, 1e-3, record_every=10)
        np.testing.assert_allclose(tr.n_a, s0.n_a * np.cos(tr.t), atol=1e-6 * n)
        assert oscillation_period(tr.t, tr.n_a) == pytest.approx(2 * math.pi, rel=1e-4)
        mask = tr.t <= 4 * math.pi
        assert abs(np.mean(tr.n_a[mask])) < 0.01 * n


def test_balanced_partner_period_shrinks_with_n():
    # starting B balanced breaks the cancellation; A is then self-trapped and
    # its fast oscillation speeds up with N
    periods = []
    for n in (3, 5, 9):
        p = MeanFieldParams(BASE, n, n)
        tr = integrate(p, MeanFieldState(0.5 * n * (1 - 1e-3), 0, 0, 0), 0.3, 1e-5, record_every=1)
        periods.append(oscillation_period(tr.t, tr.n_a))
    assert periods[0] > periods[1] > periods[2]


def test_oscillation_period_on_sine():
    t = np.linspace(0, 20, 2001)
    assert oscillation_period(t, np.cos(2 * t + 0.3)) == pytest.approx(math.pi, abs=1e-4)
    assert math.isnan(oscillation_period(t[:100], np.cos(t[:100])))
