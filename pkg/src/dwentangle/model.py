"""Model parameters and the spin-half effective two-qubit Hamiltonian.

Each component (A, B) is reduced to a pseudo-spin living on {|L>, |R>}.
The two-qubit product basis is ordered (LL, LR, RL, RR), with the A label
first; index = 2 * (A in R) + (B in R).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .numerics import EigenSystem

BASIS_LABELS = ("LL", "LR", "RL", "RR")


class Component(str, Enum):
    A = "A"
    B = "B"


class Well(str, Enum):
    L = "L"
    R = "R"


def basis_index(well_a: Well | str, well_b: Well | str) -> int:
    """Product-basis index of |well_a>_A |well_b>_B."""
    return 2 * (Well(well_a) is Well.R) + (Well(well_b) is Well.R)


@dataclass(frozen=True)
class ModelParams:
    """Tunneling rate and interaction strengths (hbar = 1)."""

    omega: float
    kappa: float
    kappa_a: float
    kappa_b: float

    def __post_init__(self):
        for name in ("omega", "kappa", "kappa_a", "kappa_b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")


def tunneling_rate(n_particles: int, eps_lr: float, g_t1: float) -> float:
    """Particle-number dependent tunneling rate ``eps_lr + g_t1 * (N - 1)``."""
    if n_particles < 1:
        raise ValueError(f"n_particles must be >= 1, got {n_particles}")
    return eps_lr + g_t1 * (n_particles - 1)


@dataclass(frozen=True)
class EffectiveHamiltonian:
    k: float
    k1: float
    k2: float
    theta_big: float
    matrix: np.ndarray


def build_effective_hamiltonian(p: ModelParams) -> EffectiveHamiltonian:
    k = p.omega / 2
    k1 = p.kappa + p.kappa_a / 2 + p.kappa_b / 2
    k2 = (p.kappa_a + p.kappa_b) / 2
    theta_big = math.hypot(k1 - k2, 4 * k)
    m = np.array([
        [k1, k, k, 0.0],
        [k, k2, 0.0, k],
        [k, 0.0, k2, k],
        [0.0, k, k, k1],
    ])
    m.setflags(write=False)
    return EffectiveHamiltonian(k, k1, k2, theta_big, m)


def closed_form_eigensystem(h: EffectiveHamiltonian) -> EigenSystem:
    """Analytic eigenpairs of the effective Hamiltonian, sorted ascending.

    The singlet (E = K2) and (LL - RR)/sqrt2 (E = K1) are exact. The other two
    live in span{s = (LL+RR)/sqrt2, u = (LR+RL)/sqrt2}, where H acts as
    [[K1, 2K], [2K, K2]]; their vectors are proportional to (1, x, x, 1) with
    x = (E - K1) / (2K). That ratio is evaluated through the block's rotation
    angle, which keeps the pair exactly orthogonal and finite as K -> 0.
    """
    k, k1, k2, th = h.k, h.k1, h.k2, h.theta_big
    s2 = 1 / math.sqrt(2)
    s_vec = np.array([s2, 0.0, 0.0, s2])
    u_vec = np.array([0.0, s2, s2, 0.0])
    pairs = [
        (k2, np.array([0.0, -s2, s2, 0.0])),
        (k1, np.array([s2, 0.0, 0.0, -s2])),
    ]
    # rotation angle of the 2x2 block: tan(2 phi) = 4K / (K1 - K2)
    phi = 0.5 * math.atan2(4 * k, k1 - k2)
    c, s = math.cos(phi), math.sin(phi)
    pairs.append(((k2 + k1 + th) / 2, c * s_vec + s * u_vec))
    pairs.append(((k2 + k1 - th) / 2, c * u_vec - s * s_vec))
    pairs.sort(key=lambda ev: ev[0])
    values = np.array([e for e, _ in pairs])
    vectors = np.column_stack([v for _, v in pairs]).astype(complex)
    return EigenSystem(values, vectors)
