"""Exact two-mode, two-component Bose-Hubbard Hamiltonian on the Fock basis.

Basis states are |n_AL, n_BL> at fixed totals N_A, N_B (right-well
occupations implied), ordered lexicographically in (n_AL, n_BL):
index = n_AL * (N_B + 1) + n_BL.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Propagator, check_state
from .model import Component, ModelParams

MAX_DIM = 4096


@dataclass(frozen=True)
class FockBasis:
    n_a_total: int
    n_b_total: int

    def __post_init__(self):
        if self.n_a_total < 1 or self.n_b_total < 1:
            raise ValueError("particle numbers must be >= 1")

    @property
    def dim(self) -> int:
        return (self.n_a_total + 1) * (self.n_b_total + 1)

    @property
    def states(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n_a_total + 1) for b in range(self.n_b_total + 1)]

    def index(self, n_al: int, n_bl: int) -> int:
        if not (0 <= n_al <= self.n_a_total and 0 <= n_bl <= self.n_b_total):
            raise ValueError(f"occupation ({n_al}, {n_bl}) outside basis")
        return n_al * (self.n_b_total + 1) + n_bl

    def left_occupations(self) -> tuple[np.ndarray, np.ndarray]:
        n_al, n_bl = np.divmod(np.arange(self.dim), self.n_b_total + 1)
        return n_al, n_bl

    def mirror_permutation(self) -> np.ndarray:
        """perm[i] is the index of the L<->R mirror image of basis state i."""
        n_al, n_bl = self.left_occupations()
        return (self.n_a_total - n_al) * (self.n_b_total + 1) + (self.n_b_total - n_bl)


@dataclass(frozen=True)
class FockHamiltonian:
    basis: FockBasis
    matrix: np.ndarray


def build_fock_hamiltonian(p: ModelParams, n_a: int, n_b: int,
                           max_dim: int = MAX_DIM) -> FockHamiltonian:
    basis = FockBasis(n_a, n_b)
    dim = basis.dim
    if dim > max_dim:
        raise ValueError(f"Fock dimension {dim} exceeds cap {max_dim}")
    n_al, n_bl = basis.left_occupations()
    n_ar, n_br = n_a - n_al, n_b - n_bl
    h = np.zeros((dim, dim))
    h[np.diag_indices(dim)] = (
        p.kappa * (n_al * n_bl + n_ar * n_br)
        + p.kappa_a / 2 * (n_al**2 + n_ar**2)
        + p.kappa_b / 2 * (n_bl**2 + n_br**2)
    )
    for i in range(dim):
        a, b = n_al[i], n_bl[i]
        if a < n_a:
            j = basis.index(a + 1, b)
            h[i, j] = h[j, i] = p.omega / 2 * math.sqrt((a + 1) * (n_a - a))
        if b < n_b:
            j = basis.index(a, b + 1)
            h[i, j] = h[j, i] = p.omega / 2 * math.sqrt((b + 1) * (n_b - b))
    h.setflags(write=False)
    return FockHamiltonian(basis, h)


# effective-model index (LL, LR, RL, RR) -> Fock index at N_A = N_B = 1
SPIN_HALF_TO_FOCK = np.array([3, 2, 1, 0])


def pod_operator_diagonal(basis: FockBasis, component: Component | str) -> np.ndarray:
    """Diagonal of n_L - n_R for one component."""
    n_al, n_bl = basis.left_occupations()
    if Component(component) is Component.A:
        return 2 * n_al - basis.n_a_total
    return 2 * n_bl - basis.n_b_total


def pod_expectation(h: FockHamiltonian, psi, component: Component | str):
    """<n_L - n_R> for one component. ``psi`` may be a (times, dim) stack."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != h.basis.dim:
        raise ValueError(f"dimension mismatch: state has {psi.shape[-1]}, basis has {h.basis.dim}")
    if psi.ndim == 1:
        check_state(psi, h.basis.dim)
    val = (np.abs(psi) ** 2) @ pod_operator_diagonal(h.basis, component)
    return val if np.ndim(val) else float(val)


def imbalanced_state(basis: FockBasis) -> np.ndarray:
    """All of A in the left well, all of B in the right well."""
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index(basis.n_a_total, 0)] = 1.0
    return psi


@dataclass(frozen=True)
class PodTrace:
    t: np.ndarray
    pod_a: np.ndarray
    pod_b: np.ndarray


def oracle_evolve_pod(p: ModelParams, n_a: int, n_b: int, t_grid,
                      method: str = "auto", psi0=None) -> PodTrace:
    """Exact POD traces of both components from the fully imbalanced start."""
    h = build_fock_hamiltonian(p, n_a, n_b)
    prop = Propagator.from_matrix(h.matrix, method=method)
    psi0 = imbalanced_state(h.basis) if psi0 is None else psi0
    t = np.asarray(t_grid, dtype=float)
    psi_t = prop.evolve(psi0, t)
    return PodTrace(t, pod_expectation(h, psi_t, "A"), pod_expectation(h, psi_t, "B"))


def diagonal_ensemble_pod(p: ModelParams, n_a: int, n_b: int,
                          component: Component | str = "A", psi0=None) -> tuple[float, float]:
    """Infinite-time mean and variance of the POD from eigenbasis populations.

    Degenerate eigenvalues are grouped so that coherences inside a
    degenerate cluster (which do not dephase) are kept in the mean.
    Returns (mean, temporal variance).
    """
    h = build_fock_hamiltonian(p, n_a, n_b)
    prop = Propagator.from_matrix(h.matrix)
    psi0 = imbalanced_state(h.basis) if psi0 is None else psi0
    c = prop.coefficients(psi0)
    v, e = prop.eig.vectors, prop.eig.values
    op = (v.conj().T * pod_operator_diagonal(h.basis, component)) @ v
    scale = max(np.abs(e).max(), 1.0)
    same = np.abs(e[:, None] - e[None, :]) < 1e-9 * scale
    cc = np.conj(c)[:, None] * c[None, :]
    terms = cc * op
    mean = float(np.sum(terms[same]).real)
    # time average of |sum over nonresonant pairs|^2; pairs with equal gaps are lumped
    gaps = (e[:, None] - e[None, :])[~same]
    amp = terms[~same]
    if gaps.size == 0:
        return mean, 0.0
    order = np.argsort(gaps)
    gaps, amp = gaps[order], amp[order]
    var = 0.0
    start = 0
    for i in range(1, len(gaps) + 1):
        if i == len(gaps) or gaps[i] - gaps[start] > 1e-9 * scale:
            var += abs(amp[start:i].sum()) ** 2
            start = i
    return mean, float(var)


def fock_to_spin_half(psi) -> np.ndarray:
    """Reorder N_A = N_B = 1 Fock amplitudes into the (LL, LR, RL, RR) basis."""
    psi = np.asarray(psi)
    if psi.shape[-1] != 4:
        raise ValueError("spin-half mapping needs N_A = N_B = 1 (dimension 4)")
    return psi[..., SPIN_HALF_TO_FOCK]
