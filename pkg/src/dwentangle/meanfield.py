"""Classical mean-field dynamics of the two-component double well.

State vector ordering is (n_a, n_b, theta_a, theta_b) where n = (n_L - n_R)/2
is the population difference (POD) and theta the relative phase.
All routines broadcast: a state of shape (4, m) with matching particle-number
arrays integrates m independent trajectories at once.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams
from .numerics import IntegrationError, rk4_step

log = logging.getLogger(__name__)

SING_REL = 1e-9
DEFAULT_DT = 1e-4
DEFAULT_IMBALANCE_EPS = 1e-3
PHASE_STEP_WARN = 0.1


class SingularityError(IntegrationError):
    """State reached the full-imbalance boundary where the phase equations diverge."""


@dataclass(frozen=True)
class MeanFieldParams:
    model: ModelParams
    n_total_a: float
    n_total_b: float

    def __post_init__(self):
        if not (np.all(np.asarray(self.n_total_a) > 0) and np.all(np.asarray(self.n_total_b) > 0)):
            raise ValueError("particle numbers must be positive")


@dataclass(frozen=True)
class MeanFieldState:
    n_a: float
    n_b: float
    theta_a: float
    theta_b: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(np.broadcast_arrays(self.n_a, self.n_b, self.theta_a, self.theta_b), dtype=float)


def default_initial_state(p: MeanFieldParams, eps: float = DEFAULT_IMBALANCE_EPS) -> MeanFieldState:
    """A almost entirely in the left well, B almost entirely in the right."""
    return MeanFieldState(0.5 * p.n_total_a * (1 - eps), -0.5 * p.n_total_b * (1 - eps), 0.0, 0.0)


def _as_vector(s) -> np.ndarray:
    if isinstance(s, MeanFieldState):
        return s.as_array()
    return np.asarray(s, dtype=float)


def _root(n_total, pod):
    arg = np.asarray(n_total, dtype=float) ** 2 - (2 * pod) ** 2
    if np.any(arg < 0):
        raise ValueError(f"|2n| exceeds N: square-root argument {np.min(arg)} < 0")
    return np.sqrt(arg)


def classical_energy(p: MeanFieldParams, s):
    """Mean-field energy, constant interaction offset included."""
    n_a, n_b, th_a, th_b = _as_vector(s)
    m, na, nb = p.model, p.n_total_a, p.n_total_b
    ra = _root(na, n_a)
    rb = _root(nb, n_b)
    e = (
        m.omega / 2 * (ra * np.cos(th_a) + rb * np.cos(th_b))
        + m.kappa / 2 * na * nb + m.kappa_a / 4 * na**2 + m.kappa_b / 4 * nb**2
        + m.kappa_a * n_a**2 + m.kappa_b * n_b**2 + 2 * m.kappa * n_a * n_b
    )
    return e if np.ndim(e) else float(e)


def _derivative(m: ModelParams, na, nb, y, t):
    if y.ndim == 1 and na.ndim == 0 and nb.ndim == 0:
        return _derivative_scalar(m, float(na), float(nb), y, t)
    n_a, n_b, th_a, th_b = y
    if np.any(na - 2 * np.abs(n_a) <= SING_REL * na) or np.any(nb - 2 * np.abs(n_b) <= SING_REL * nb):
        raise SingularityError("population difference reached full imbalance", t)
    ra = np.sqrt(na * na - 4 * n_a * n_a)
    rb = np.sqrt(nb * nb - 4 * n_b * n_b)
    return np.array([
        m.omega / 2 * ra * np.sin(th_a),
        m.omega / 2 * rb * np.sin(th_b),
        -2 * m.omega * n_a * np.cos(th_a) / ra + 2 * m.kappa_a * n_a + 2 * m.kappa * n_b,
        -2 * m.omega * n_b * np.cos(th_b) / rb + 2 * m.kappa_b * n_b + 2 * m.kappa * n_a,
    ])


def _derivative_scalar(m: ModelParams, na: float, nb: float, y, t):
    n_a, n_b, th_a, th_b = y.tolist()
    if na - 2 * abs(n_a) <= SING_REL * na or nb - 2 * abs(n_b) <= SING_REL * nb:
        raise SingularityError("population difference reached full imbalance", t)
    ra = math.sqrt(na * na - 4 * n_a * n_a)
    rb = math.sqrt(nb * nb - 4 * n_b * n_b)
    return np.array([
        m.omega / 2 * ra * math.sin(th_a),
        m.omega / 2 * rb * math.sin(th_b),
        -2 * m.omega * n_a * math.cos(th_a) / ra + 2 * m.kappa_a * n_a + 2 * m.kappa * n_b,
        -2 * m.omega * n_b * math.cos(th_b) / rb + 2 * m.kappa_b * n_b + 2 * m.kappa * n_a,
    ])


def equations_of_motion(p: MeanFieldParams, s, t: float = math.nan) -> np.ndarray:
    """Time derivative (dn_a, dn_b, dtheta_a, dtheta_b).

    Raises SingularityError within SING_REL * N of full imbalance, where the
    phase equations divide by zero.
    """
    na = np.asarray(p.n_total_a, dtype=float)
    nb = np.asarray(p.n_total_b, dtype=float)
    return _derivative(p.model, na, nb, _as_vector(s), t)


@dataclass
class Trajectory:
    """Sampled trajectory; arrays have shape (samples,) or (samples, m) for batches."""

    t: np.ndarray
    n_a: np.ndarray
    n_b: np.ndarray
    theta_a: np.ndarray
    theta_b: np.ndarray
    energy: np.ndarray
    energy0: float | np.ndarray
    warnings: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    @property
    def relative_drift(self) -> np.ndarray:
        return np.abs(self.energy - self.energy0) / np.abs(self.energy0)

    def samples(self):
        for i in range(len(self.t)):
            yield MeanFieldState(self.n_a[i], self.n_b[i], self.theta_a[i], self.theta_b[i], self.t[i])

    def final(self) -> np.ndarray:
        return np.array([self.n_a[-1], self.n_b[-1], self.theta_a[-1], self.theta_b[-1]])


def integrate(p: MeanFieldParams, s0, t_end: float, dt: float = DEFAULT_DT,
              record_every: int = 1) -> Trajectory:
    """Fixed-step RK4 from t=0 to ``t_end``.

    ``dt`` is shrunk slightly if needed so the last step lands on ``t_end``.
    Raises SingularityError (carrying the failure time) if a step reaches
    the full-imbalance boundary.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    y = _as_vector(s0).copy()
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / n_steps

    m = p.model
    na = np.asarray(p.n_total_a, dtype=float)
    nb = np.asarray(p.n_total_b, dtype=float)

    def rhs(t, y):
        return _derivative(m, na, nb, y, t)

    warnings: list[str] = []

    def check_step(t, y):
        rate = np.max(np.abs(rhs(t, y)[2:]))
        if h * rate > PHASE_STEP_WARN and not warnings:
            msg = f"phase advance per step {h * rate:.3g} rad exceeds {PHASE_STEP_WARN} at t={t:.6g}"
            warnings.append(msg)
            log.warning(msg)

    check_step(0.0, y)
    ts, ys = [0.0], [y]
    for i in range(1, n_steps + 1):
        t = (i - 1) * h
        y = rk4_step(rhs, y, t, h)
        if i % record_every == 0 or i == n_steps:
            ts.append(i * h)
            ys.append(y)
            check_step(i * h, y)
    arr = np.array(ys)
    energy = classical_energy(p, np.moveaxis(arr, 1, 0))
    return Trajectory(
        t=np.array(ts), n_a=arr[:, 0], n_b=arr[:, 1], theta_a=arr[:, 2], theta_b=arr[:, 3],
        energy=np.asarray(energy), energy0=classical_energy(p, _as_vector(s0)), warnings=warnings,
    )


def time_reversal_error(p: MeanFieldParams, s0, t_end: float, dt: float = DEFAULT_DT):
    """Integrate forward, flip both phases, integrate again; return |n(final) - n(0)|."""
    y0 = _as_vector(s0)
    fwd = integrate(p, y0, t_end, dt, record_every=10**9).final()
    fwd[2:] *= -1
    back = integrate(p, fwd, t_end, dt, record_every=10**9).final()
    return np.max(np.abs(back[:2] - y0[:2]), axis=0)


def oscillation_period(t, x) -> float:
    """Spacing between the first two local maxima of a sampled signal.

    Each maximum is refined by a parabola through its three samples.
    Returns nan if fewer than two interior maxima exist.
    """
    t, x = np.asarray(t), np.asarray(x)
    idx = np.nonzero((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:]))[0] + 1
    if len(idx) < 2:
        return math.nan
    peaks = []
    for i in idx[:2]:
        y0, y1, y2 = x[i - 1], x[i], x[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        peaks.append(t[i] + shift * (t[i + 1] - t[i]))
    return peaks[1] - peaks[0]
