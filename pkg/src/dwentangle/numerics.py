"""Small dense numeric kernels: Hermitian eigensolver, RK4 step, golden-section search.

Complex scalars are plain Python/numpy ``complex``; matrices are numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

HERM_TOL = 1e-12
RESID_TOL = 1e-10
JACOBI_MAX_DIM = 128
JACOBI_MAX_SWEEPS = 60

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NonHermitianError(ValueError):
    """Matrix is not square or not Hermitian."""


class IntegrationError(RuntimeError):
    """Non-finite state produced during integration."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t:.17g})")
        self.t = t


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and the matching eigenvectors (as columns)."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def check_hermitian(h, tol: float | None = None) -> np.ndarray:
    """Return ``h`` as a complex array, raising if it is not square Hermitian."""
    tol = HERM_TOL if tol is None else tol
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise NonHermitianError(f"non-finite entry at ({i}, {j}): {a[i, j]}")
    dev = np.abs(a - a.conj().T)
    scale = max(np.abs(a).max(), 1.0)
    if dev.max() > tol * scale:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise NonHermitianError(
            f"matrix not Hermitian: worst entry ({i}, {j}) = {a[i, j]} "
            f"vs conj of ({j}, {i}) = {np.conj(a[j, i])}, deviation {dev[i, j]:.3e}"
        )
    return a


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # cyclic Jacobi with complex rotations: a phase on column q makes a[p, q]
    # real, then a real Givens rotation annihilates it
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.abs(a).max()
    if n == 1 or scale == 0.0:
        return a.diagonal().real.copy(), v
    # work on a copy scaled by an exact power of two to order one, so tiny
    # or huge entries cannot under/overflow
    exp = math.frexp(scale)[1]
    a = np.ldexp(a.real, -exp) + 1j * np.ldexp(a.imag, -exp)
    thresh = 1e-15
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.abs(a - np.diag(a.diagonal())).max()
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= thresh * 1e-3:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u
    return np.ldexp(a.diagonal().real, exp), v


def eigensolve_hermitian(h, method: str = "auto", tol: float | None = None) -> EigenSystem:
    """Diagonalize a dense Hermitian matrix.

    ``method`` is ``"jacobi"`` (cyclic complex Jacobi), ``"lapack"`` (numpy's
    ``eigh``) or ``"auto"``, which uses Jacobi up to ``JACOBI_MAX_DIM``.
    Eigenvalues are returned ascending. Within a degenerate cluster the
    eigenvectors are orthonormal but otherwise arbitrary.
    """
    a = check_hermitian(h, tol)
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, v = _jacobi(a)
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    order = np.argsort(w, kind="stable")
    return EigenSystem(w[order], v[:, order])


def rk4_step(f: Callable, y, t: float, h: float):
    """One classical fourth-order Runge-Kutta step of ``dy/dt = f(t, y)``."""
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h}")
    k1 = f(t, y)
    k2 = f(t + h / 2, y + (h / 2) * k1)
    k3 = f(t + h / 2, y + (h / 2) * k2)
    k4 = f(t + h, y + h * k3)
    y_new = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(y_new)):
        raise IntegrationError("non-finite state in RK4 step", t)
    return y_new


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       rtol: float = 1e-6) -> float:
    """Locate a maximum of ``f`` on ``[a, b]`` by golden-section search."""
    scale = max(abs(a), abs(b), 1.0)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > rtol * scale:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
