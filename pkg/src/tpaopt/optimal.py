"""Optimal classical pulse pairs, optimal two-photon states, and diagnostics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    EmptyDecomposition,
    GridMismatch,
    PerturbativeWarning,
    UnnormalizedCoefficients,
    UnsupportedMode,
    ZeroKernel,
)
from .grid import FrequencyGrid
from .model import LevelSystem, Symmetric
from .response import KernelMatrix
from .schmidt import SchmidtDecomposition


@dataclass(frozen=True, eq=False)
class PulsePair:
    a1: np.ndarray
    a2: np.ndarray
    photon_number: float
    grid_a: FrequencyGrid
    grid_b: FrequencyGrid
    t: float = 0.0

    def norms(self) -> tuple[float, float]:
        return (
            float(self.grid_a.weights @ np.abs(self.a1) ** 2),
            float(self.grid_b.weights @ np.abs(self.a2) ** 2),
        )


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    amplitude: np.ndarray
    norm_constant: float
    grid_a: FrequencyGrid
    grid_b: FrequencyGrid
    t: float = 0.0

    def norm(self) -> float:
        mag2 = np.abs(self.amplitude) ** 2
        return float(self.grid_a.weights @ mag2 @ self.grid_b.weights)


Candidate = Union[PulsePair, TwoPhotonState]


def _check_grids(kernel: KernelMatrix, obj) -> None:
    if not (kernel.grid_a.same_as(obj.grid_a) and kernel.grid_b.same_as(obj.grid_b)):
        raise GridMismatch("kernel and field live on different frequency grids")


def classical_optimal(sd: SchmidtDecomposition, N: float = 1.0, mode_index: int = 0) -> PulsePair:
    """Pulses ``A_1 = sqrt(N) psi_k``, ``A_2 = sqrt(N) phi_k`` (k = 0 is optimal).

    With the conjugated Schmidt convention the two-photon amplitude of this
    pair is ``N r_k``.  In symmetric mode on a shared grid the free relative
    phase ``A_1 -> A_1 e^{ia}, A_2 -> A_2 e^{-ia}`` is spent to make
    ``A_1 == A_2``; the product, and hence every probability, is unchanged.
    """
    if sd.rank == 0:
        raise EmptyDecomposition("decomposition holds no modes")
    if not N > 0:
        raise ValueError(f"photon number must be > 0 (got {N})")
    psi, phi = sd.psi[mode_index], sd.phi[mode_index]
    if isinstance(sd.system.coupling_mode, Symmetric) and sd.grid_a.same_as(sd.grid_b):
        overlap = np.vdot(psi * sd.grid_a.weights, phi)
        if abs(overlap) > 0.5:
            half = np.exp(0.5j * np.angle(overlap))
            psi, phi = psi * half, phi * np.conj(half)
    root = math.sqrt(N)
    return PulsePair(root * psi, root * phi, float(N), sd.grid_a, sd.grid_b, sd.t)


def quantum_optimal(kernel: KernelMatrix) -> TwoPhotonState:
    """Normalized ``conj(T_t)`` with ``norm_constant = iint |T_t|^2``."""
    norm = kernel.norm2()
    if not norm > 0:
        raise ZeroKernel("kernel vanishes on the grid")
    amp = np.conj(kernel.values) / math.sqrt(norm)
    return TwoPhotonState(amp, norm, kernel.grid_a, kernel.grid_b, kernel.t)


def classical_amplitude(kernel: KernelMatrix, p: PulsePair) -> complex:
    _check_grids(kernel, p)
    wa1 = kernel.grid_a.weights * p.a1
    wa2 = kernel.grid_b.weights * p.a2
    return complex(wa1 @ kernel.values @ wa2)


def transition_prob_classical(kernel: KernelMatrix, p: PulsePair) -> float:
    return abs(classical_amplitude(kernel, p)) ** 2


def transition_prob_quantum(kernel: KernelMatrix, s: TwoPhotonState) -> float:
    _check_grids(kernel, s)
    ww = kernel.grid_a.weights[:, None] * kernel.grid_b.weights[None, :]
    amp = np.sum(ww * kernel.values * s.amplitude)
    return float(abs(amp) ** 2)


def enhancement(sd: SchmidtDecomposition) -> float:
    return enhancement_from_values(sd.r)


def enhancement_from_values(r: np.ndarray) -> float:
    """``1 + sum_{k>=2} r_k^2 / r_1^2`` for descending ``r``."""
    if len(r) == 0 or not r[0] > 0:
        raise ZeroKernel("leading Schmidt coefficient is zero")
    r = np.asarray(r, dtype=float)
    return float(1.0 + np.sum(r[1:] ** 2) / r[0] ** 2)


def _ls_residual(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, complex]:
    """Relative weighted L2 mismatch of x against the best multiple c*y."""
    xx = float(np.real(np.sum(w * np.abs(x) ** 2)))
    yy = float(np.real(np.sum(w * np.abs(y) ** 2)))
    if yy == 0.0:
        return 1.0, 0j
    c = np.sum(w * np.conj(y) * x) / yy
    res = np.sum(w * np.abs(x - c * y) ** 2)
    return float(math.sqrt(max(res, 0.0) / xx)), complex(c)


def fixed_point_residual(kernel: KernelMatrix, candidate: Candidate, with_multiplier: bool = False):
    """Distance of ``candidate`` from the optimality integral equations.

    The right-hand-side operator is applied with multiplier 1; the multiplier
    is then recovered as the least-squares scale matching input to output, and
    the relative weighted L2 mismatch is returned (plus the multiplier when
    ``with_multiplier``).  Pulse pairs are tested on both equations at once
    with a single shared multiplier.
    """
    _check_grids(kernel, candidate)
    T = kernel.values
    wa, wb = kernel.grid_a.weights, kernel.grid_b.weights
    if isinstance(candidate, PulsePair):
        a1, a2 = candidate.a1, candidate.a2
        amp = (wa * a1) @ T @ (wb * a2)
        n1, n2 = candidate.norms()
        out1 = np.conj(T @ (wb * a2)) * amp / n2
        out2 = np.conj((wa * a1) @ T) * amp / n1
        x = np.concatenate([a1, a2])
        y = np.concatenate([out1, out2])
        w = np.concatenate([wa, wb])
    else:
        phi = candidate.amplitude
        amp = wa @ (T * phi) @ wb
        y = (np.conj(T) * amp).ravel()
        x = phi.ravel()
        w = (wa[:, None] * wb[None, :]).ravel()
    res, c = _ls_residual(x, y, w)
    if with_multiplier:
        lam = 1.0 / c.real if c != 0 else math.inf
        return res, lam
    return res


def coefficient_prob(
    sd: SchmidtDecomposition,
    c: Sequence[complex],
    d: Sequence[complex] | None = None,
    N: float = 1.0,
    mixed: bool = False,
) -> float:
    """Probability for pulses expanded in the Schmidt basis.

    Coherent: ``A_1 = sqrt(N) sum c_k psi_k``, ``A_2 = sqrt(N) sum d_k phi_k``
    gives ``|N sum r_k c_k d_k|^2``.  Mixed: ``c`` holds mixture weights over
    the mode pairs and the result is ``N^2 sum p_k r_k^2``.
    """
    c = np.asarray(c)
    if len(c) > sd.rank:
        if np.any(np.abs(c[sd.rank:]) > 0):
            raise ValueError("coefficients address more modes than the decomposition holds")
        c = c[: sd.rank]
    r = sd.r[: len(c)]
    if mixed:
        p = np.asarray(c, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
            raise UnnormalizedCoefficients("mixture weights must be >= 0 and sum to 1")
        return float(N**2 * np.sum(p * r**2))
    if d is None:
        raise ValueError("coherent mode needs both c and d")
    d = np.asarray(d)[: len(c)]
    if len(d) < len(c):
        d = np.concatenate([d, np.zeros(len(c) - len(d))])
    for label, v in (("c", c), ("d", d)):
        if abs(np.sum(np.abs(v) ** 2) - 1.0) > 1e-10:
            raise UnnormalizedCoefficients(f"sum |{label}_k|^2 must equal 1")
    return float(abs(N * np.sum(r * c * d)) ** 2)


def analytic_norm(sys: LevelSystem) -> float:
    """Closed form of ``iint |T|^2`` for the symmetric kernel."""
    if not isinstance(sys.coupling_mode, Symmetric):
        raise UnsupportedMode("closed-form normalization holds for the symmetric kernel only")
    return 2 * math.pi**2 * sys.coupling**2 / (sys.gamma_e * sys.gamma_f)


@dataclass
class OptimizationResult:
    decomposition: SchmidtDecomposition
    pulses: PulsePair
    state: TwoPhotonState
    pf_classical: float
    pf_quantum: float
    enhancement: float
    residual_classical: float
    residual_quantum: float

    def summary(self) -> dict:
        sd = self.decomposition
        N = self.pulses.photon_number
        out = {
            "r1": float(sd.r[0]),
            "sum_rk2": sd.sum_r2,
            "E": self.enhancement,
            "N": N,
            "pf_classical": self.pf_classical,
            "pf_quantum": self.pf_quantum,
            "pf_classical_per_pair": self.pf_classical / N**2,
            "norm_constant": self.state.norm_constant,
            "rank": sd.rank,
            "residual_classical": self.residual_classical,
            "residual_quantum": self.residual_quantum,
        }
        if max(self.pf_classical, self.pf_quantum) > 0.1:
            warnings.warn(
                "reported probability exceeds 0.1; second-order perturbation theory is not self-consistent",
                PerturbativeWarning,
                stacklevel=2,
            )
        return out


def optimize(kernel: KernelMatrix, sd: SchmidtDecomposition, N: float = 1.0) -> OptimizationResult:
    """Run the full optimal-field pipeline on a decomposed kernel."""
    pulses = classical_optimal(sd, N)
    state = quantum_optimal(kernel)
    return OptimizationResult(
        decomposition=sd,
        pulses=pulses,
        state=state,
        pf_classical=transition_prob_classical(kernel, pulses),
        pf_quantum=transition_prob_quantum(kernel, state),
        enhancement=enhancement(sd),
        residual_classical=fixed_point_residual(kernel, pulses),
        residual_quantum=fixed_point_residual(kernel, state),
    )
