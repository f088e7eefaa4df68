"""Exact unitary evolution under a time-independent Hamiltonian."""
from __future__ import annotations

import numpy as np

from .model import Component, basis_index
from .numerics import EigenSystem, eigensolve_hermitian

NORM_TOL = 1e-12


def check_state(psi, dim: int | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state must be a 1-d amplitude vector, got shape {psi.shape}")
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"dimension mismatch: state has {psi.shape[0]}, expected {dim}")
    norm2 = np.vdot(psi, psi).real
    if abs(norm2 - 1.0) > NORM_TOL * max(1, psi.shape[0]):
        raise ValueError(f"state not normalized: <psi|psi> = {norm2!r}")
    return psi


def initial_state_LR() -> np.ndarray:
    """|L>_A |R>_B: component A in the left well, B in the right."""
    psi = np.zeros(4, dtype=complex)
    psi[basis_index("L", "R")] = 1.0
    return psi


class Propagator:
    """exp(-iHt) built from a spectral decomposition.

    Accepts a scalar ``t`` (returns one state) or a 1-d array of times
    (returns an array of shape ``(len(t), dim)``).
    """

    def __init__(self, eig: EigenSystem):
        self.eig = eig
        self.dim = eig.dim

    @classmethod
    def from_matrix(cls, h, method: str = "auto") -> "Propagator":
        return cls(eigensolve_hermitian(h, method=method))

    def coefficients(self, psi) -> np.ndarray:
        psi = check_state(psi, self.dim)
        return self.eig.vectors.conj().T @ psi

    def evolve(self, psi, t):
        c = self.coefficients(psi)
        v, e = self.eig.vectors, self.eig.values
        if np.ndim(t) == 0:
            return v @ (np.exp(-1j * e * t) * c)
        t = np.asarray(t, dtype=float)
        return (np.exp(-1j * np.outer(t, e)) * c) @ v.T

    def energy(self, psi) -> float:
        c = self.coefficients(psi)
        return float(np.sum(np.abs(c) ** 2 * self.eig.values))


def expectation_sz(psi, component: Component | str) -> float:
    """<S_z> of one pseudo-spin; |L> is +1/2 and |R> is -1/2."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != 4:
        raise ValueError(f"dimension mismatch: expected 4 amplitudes, got {psi.shape[-1]}")
    p = np.abs(psi) ** 2
    if Component(component) is Component.A:
        val = 0.5 * (p[..., 0] + p[..., 1] - p[..., 2] - p[..., 3])
    else:
        val = 0.5 * (p[..., 0] - p[..., 1] + p[..., 2] - p[..., 3])
    return val if np.ndim(val) else float(val)
