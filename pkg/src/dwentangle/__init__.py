"""Two-component double-well condensate: mean-field dynamics, spin-half
two-qubit entanglement, and an exact Fock-space check of the reduction."""

from .model import ModelParams, build_effective_hamiltonian, closed_form_eigensystem, tunneling_rate
from .numerics import EigenSystem, eigensolve_hermitian, rk4_step
from .dynamics import Propagator, expectation_sz, initial_state_LR
from .entanglement import (
    PeakReport,
    concurrence_mixed,
    concurrence_pure,
    concurrence_trace,
    find_peaks,
    peak_time_formula,
)

__all__ = [
    "ModelParams", "build_effective_hamiltonian", "closed_form_eigensystem", "tunneling_rate",
    "EigenSystem", "eigensolve_hermitian", "rk4_step",
    "Propagator", "expectation_sz", "initial_state_LR",
    "PeakReport", "concurrence_mixed", "concurrence_pure", "concurrence_trace",
    "find_peaks", "peak_time_formula",
]
