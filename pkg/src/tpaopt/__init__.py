"""Optimal classical and entangled two-photon excitation of a three-level ladder."""

__version__ = "0.1.0"

from .errors import TpaOptError
from .grid import FrequencyGrid, graded_grid, quad_check, reference_grid, uniform_grid
from .model import LevelSystem, SinglePath, Symmetric, TwoAtom, from_rubidium, make_system
from .optimal import (
    PulsePair,
    TwoPhotonState,
    analytic_norm,
    classical_optimal,
    coefficient_prob,
    enhancement,
    fixed_point_residual,
    optimize,
    quantum_optimal,
    transition_prob_classical,
    transition_prob_quantum,
)
from .response import KernelMatrix, build_kernel, response_at
from .schmidt import SchmidtDecomposition, decompose, schmidt_residual

__all__ = [
    "FrequencyGrid",
    "KernelMatrix",
    "LevelSystem",
    "PulsePair",
    "SchmidtDecomposition",
    "SinglePath",
    "Symmetric",
    "TpaOptError",
    "TwoAtom",
    "TwoPhotonState",
    "analytic_norm",
    "build_kernel",
    "classical_optimal",
    "coefficient_prob",
    "decompose",
    "enhancement",
    "fixed_point_residual",
    "from_rubidium",
    "graded_grid",
    "make_system",
    "optimize",
    "quad_check",
    "quantum_optimal",
    "reference_grid",
    "response_at",
    "schmidt_residual",
    "transition_prob_classical",
    "transition_prob_quantum",
    "uniform_grid",
]
