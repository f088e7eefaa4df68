"""Wootters concurrence and entanglement-peak analysis for the effective model."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Propagator, check_state, initial_state_LR
from .model import ModelParams, build_effective_hamiltonian, closed_form_eigensystem
from .numerics import eigensolve_hermitian, golden_section_max

log = logging.getLogger(__name__)

DM_TOL = 1e-12
PSD_FLOOR = 1e-10
CLAMP_TOL = 1e-10
WEAK_C = 0.1

_SY = np.array([[0, -1j], [1j, 0]])
SYSY = np.kron(_SY, _SY)


def check_density_matrix(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"density matrix must be 4x4, got shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > DM_TOL:
        raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1) > DM_TOL:
        raise ValueError(f"density matrix trace is {tr!r}, not 1")
    w = eigensolve_hermitian(rho).values
    if w[0] < -PSD_FLOOR:
        raise ValueError(f"density matrix not positive semidefinite (eigenvalue {w[0]:.3e})")
    return rho


def concurrence_mixed(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    The lambdas are the square roots of the eigenvalues of rho @ rho_tilde.
    That product shares its spectrum with the Hermitian matrix
    sqrt(rho) rho_tilde sqrt(rho), which is what gets diagonalized here.
    """
    rho = check_density_matrix(rho)
    rho_tilde = SYSY @ rho.conj() @ SYSY
    eig = eigensolve_hermitian(rho)
    sq = np.sqrt(np.clip(eig.values, 0.0, None))
    root = (eig.vectors * sq) @ eig.vectors.conj().T
    m = root @ rho_tilde @ root
    m = 0.5 * (m + m.conj().T)
    mu = eigensolve_hermitian(m).values
    mu = np.where(np.abs(mu) < CLAMP_TOL, 0.0, mu)
    lam = np.sort(np.sqrt(np.clip(mu, 0.0, None)))[::-1]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def concurrence_pure(psi):
    """2|ad - bc| for amplitudes (a, b, c, d); also accepts a (n, 4) stack."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != 4:
        raise ValueError(f"dimension mismatch: expected 4 amplitudes, got {psi.shape[-1]}")
    if psi.ndim == 1:
        check_state(psi, 4)
    c = 2 * np.abs(psi[..., 0] * psi[..., 3] - psi[..., 1] * psi[..., 2])
    c = np.clip(c, 0.0, 1.0)
    return c if np.ndim(c) else float(c)


def effective_propagator(params: ModelParams) -> Propagator:
    return Propagator(closed_form_eigensystem(build_effective_hamiltonian(params)))


def concurrence_trace(params: ModelParams, t_grid) -> np.ndarray:
    """Concurrence C(t) of the |LR> start state, one value per grid time."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1:
        raise ValueError("t_grid must be one-dimensional")
    if np.any(np.diff(t) < 0):
        raise ValueError("t_grid must be sorted ascending")
    psi_t = effective_propagator(params).evolve(initial_state_LR(), t)
    return concurrence_pure(psi_t)


def peak_time_formula(params: ModelParams, k: int) -> float:
    """Predicted time of the k-th entanglement maximum, (2 kappa / omega^2)(pi/4 + k pi/2)."""
    if params.omega <= 0:
        raise ValueError("peak time formula needs omega > 0")
    if params.kappa <= 0:
        raise ValueError("peak time formula needs kappa > 0")
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return 2 * params.kappa / params.omega**2 * (math.pi / 4 + k * math.pi / 2)


@dataclass(frozen=True)
class PeakReport:
    k_index: int
    t_peak_numeric: float
    t_peak_formula: float
    c_peak: float
    tau_half_width: float


def width_at_level(f, t_peak: float, level: float, step: float,
                   t_min: float = 0.0, t_max: float = math.inf,
                   chunk: int = 256) -> float:
    """Length of the contiguous interval around ``t_peak`` where f >= level.

    ``f`` maps an array of times to values. The interval edges are found by
    stepping outward by ``step`` and bisecting the first crossing.
    """
    def edge(direction: int) -> float:
        inside = t_peak
        while True:
            ts = inside + direction * step * np.arange(1, chunk + 1)
            clip = ts < t_min if direction < 0 else ts > t_max
            ts = np.where(clip, t_min if direction < 0 else t_max, ts)
            vals = f(ts)
            below = np.nonzero(vals < level)[0]
            if below.size == 0:
                if clip.any():
                    return ts[-1]
                inside = ts[-1]
                continue
            j = below[0]
            lo = inside if j == 0 else ts[j - 1]
            hi = ts[j]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if f(np.array([mid]))[0] >= level:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

    return edge(+1) - edge(-1)


def _peak_segments(c: np.ndarray, level: float, merge_gap: int = 2):
    above = c >= level
    segs = []
    i, n = 0, len(c)
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        if segs and i - segs[-1][1] <= merge_gap:
            segs[-1] = (segs[-1][0], j)
        else:
            segs.append((i, j))
        i = j + 1
    return segs


def first_maximum(t, c) -> tuple[float, float]:
    """(t, C) of the grid maximum inside the first above-half-max segment."""
    c = np.asarray(c)
    i, j = _peak_segments(c, 0.5 * c.max())[0]
    g = i + int(np.argmax(c[i:j + 1]))
    return float(t[g]), float(c[g])


def find_peaks(params: ModelParams, t_max: float, n_peaks: int,
               grid_dt: float | None = None) -> list[PeakReport]:
    """Locate the first ``n_peaks`` concurrence maxima and their half-widths.

    A coarse grid (default spacing 0.05 kappa / omega^2) is split into
    separate peaks where C exceeds half its grid maximum. Each peak is
    refined by a fine scan of its segment (resolving the fast ripple) and a
    golden-section search; its width is measured at C_peak / sqrt(2).
    """
    if n_peaks < 1:
        raise ValueError(f"n_peaks must be positive, got {n_peaks}")
    if grid_dt is None:
        if params.omega <= 0 or params.kappa <= 0:
            raise ValueError("default grid spacing needs omega > 0 and kappa > 0")
        grid_dt = 0.05 * params.kappa / params.omega**2
    prop = effective_propagator(params)
    psi0 = initial_state_LR()

    def conc(ts):
        return concurrence_pure(prop.evolve(psi0, np.asarray(ts, dtype=float)))

    t = np.arange(0.0, t_max + 0.5 * grid_dt, grid_dt)
    c = conc(t)
    if c.max() < WEAK_C:
        log.warning("max concurrence %.3g below %.2g: weak-entanglement regime, no peaks", c.max(), WEAK_C)
        return []

    spread = prop.eig.values[-1] - prop.eig.values[0]
    fine = min(grid_dt, 2 * math.pi / spread / 16) if spread > 0 else grid_dt

    reports = []
    for k, (i, j) in enumerate(_peak_segments(c, 0.5 * c.max())):
        if k >= n_peaks:
            break
        lo, hi = t[max(i - 1, 0)], t[min(j + 1, len(t) - 1)]
        ts = np.arange(lo, hi + fine, fine)
        m = int(np.argmax(conc(ts)))
        a, b = max(ts[m] - fine, 0.0), ts[m] + fine
        t_pk = golden_section_max(lambda x: float(conc([x])[0]), a, b, rtol=1e-6)
        c_pk = float(conc([t_pk])[0])
        tau = width_at_level(conc, t_pk, c_pk / math.sqrt(2), fine)
        t_formula = peak_time_formula(params, k) if params.omega > 0 and params.kappa > 0 else math.nan
        reports.append(PeakReport(k, float(t_pk), t_formula, c_pk, float(tau)))
    if len(reports) < n_peaks:
        log.warning("found %d of %d requested peaks up to t=%g", len(reports), n_peaks, t_max)
    return reports


def concurrence_grid(params: ModelParams, omegas, t_grid) -> np.ndarray:
    """C(omega, t) over a grid; rows follow ``omegas``."""
    return np.vstack([concurrence_trace(replace(params, omega=float(w)), t_grid) for w in omegas])
