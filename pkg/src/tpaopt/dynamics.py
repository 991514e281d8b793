"""Time-resolved populations of the intermediate and target levels.

Everything is evaluated in the frequency domain: for infinitely extended
fields the second-order amplitudes are exact, so p_f(t) is the squared
two-photon amplitude with the kernel's explicit exp(-i(nu_a + nu_b) t) phase
and p_e(t) comes from the first-order amplitude of the g -> e step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricTimeGrid, GridMismatch, UnsupportedMode
from .model import LevelSystem, SinglePath, Symmetric
from .optimal import PulsePair, TwoPhotonState
from .response import response_at


@dataclass(frozen=True, eq=False)
class PopulationTrace:
    times: np.ndarray
    p_e: np.ndarray
    p_f: np.ndarray
    drive: str

    def peak_time(self) -> float:
        return float(self.times[np.argmax(self.p_f)])

    def rows(self):
        for t, pe, pf in zip(self.times, self.p_e, self.p_f):
            yield t, pe, pf, self.drive


def time_axis(tmin: float, tmax: float, count: int) -> np.ndarray:
    """Linear time axis; mirror-exact when ``tmin == -tmax``."""
    if count < 2 or not tmax > tmin:
        raise ValueError(f"need tmin < tmax and count >= 2 (got {tmin}, {tmax}, {count})")
    t = np.linspace(tmin, tmax, count)
    if tmin == -tmax:
        t = 0.5 * (t - t[::-1])
    return t


def _check_mode(sys: LevelSystem):
    if not isinstance(sys.coupling_mode, (Symmetric, SinglePath)):
        raise UnsupportedMode("populations are defined for the symmetric and single-path ladders")
    return isinstance(sys.coupling_mode, Symmetric)


def _phases(nodes: np.ndarray, times: np.ndarray) -> np.ndarray:
    return np.exp(-1j * times[:, None] * nodes[None, :])


def _ge_response(sys: LevelSystem, nodes: np.ndarray) -> np.ndarray:
    return sys.mu_ge * sys.field_norm / (nodes + 1j * sys.gamma_e)


def _target_amplitudes(sys, grid_a, grid_b, joint, times) -> np.ndarray:
    """sum_ij w_i w_j T_t(nu_i, nu_j) joint_ij for every t."""
    T0 = response_at(sys, grid_a.nodes[:, None], grid_b.nodes[None, :], 0.0)
    G = grid_a.weights[:, None] * grid_b.weights[None, :] * T0 * joint
    Ea = _phases(grid_a.nodes, times)
    Eb = _phases(grid_b.nodes, times)
    return np.einsum("ti,ti->t", Ea, Eb @ G.T)


def classical_populations(sys: LevelSystem, p: PulsePair, times) -> PopulationTrace:
    """Populations driven by classical envelopes ``A_1``, ``A_2``.

    The g -> e amplitude is the coherent sum of both fields in symmetric mode
    and field 1 alone in single-path mode.
    """
    symmetric = _check_mode(sys)
    times = np.asarray(times, dtype=float)
    ga, gb = p.grid_a, p.grid_b
    c_e = _phases(ga.nodes, times) @ (ga.weights * p.a1 * _ge_response(sys, ga.nodes))
    if symmetric:
        c_e = c_e + _phases(gb.nodes, times) @ (gb.weights * p.a2 * _ge_response(sys, gb.nodes))
    amp_f = _target_amplitudes(sys, ga, gb, np.outer(p.a1, p.a2), times)
    return PopulationTrace(times, np.abs(c_e) ** 2, np.abs(amp_f) ** 2, "classical")


def quantum_populations(sys: LevelSystem, s: TwoPhotonState, times) -> PopulationTrace:
    """Populations driven by a two-photon state with joint amplitude ``phi``.

    p_e sums, incoherently, the cases where the photon of field 1 or of
    field 2 has been absorbed; the leftover photon sits in orthogonal field
    modes so the two alternatives do not interfere.
    """
    symmetric = _check_mode(sys)
    times = np.asarray(times, dtype=float)
    ga, gb = s.grid_a, s.grid_b
    if s.amplitude.shape != (len(ga), len(gb)):
        raise GridMismatch("state amplitude does not match its grids")
    phi = s.amplitude
    # B1[t, j]: photon a absorbed, photon b left at nu_b[j]
    B1 = (_phases(ga.nodes, times) * (ga.weights * _ge_response(sys, ga.nodes))[None, :]) @ phi
    p_e = np.abs(B1) ** 2 @ gb.weights
    if symmetric:
        B2 = (_phases(gb.nodes, times) * (gb.weights * _ge_response(sys, gb.nodes))[None, :]) @ phi.T
        p_e = p_e + np.abs(B2) ** 2 @ ga.weights
    amp_f = _target_amplitudes(sys, ga, gb, phi, times)
    return PopulationTrace(times, p_e, np.abs(amp_f) ** 2, "quantum")


def symmetry_metric(trace: PopulationTrace) -> float:
    """``max_t |p_f(t) - p_f(-t)| / max_t p_f``."""
    t = trace.times
    scale = max(1.0, float(np.max(np.abs(t))))
    if not np.allclose(t, -t[::-1], rtol=0, atol=1e-9 * scale):
        raise AsymmetricTimeGrid("time samples must be symmetric about t = 0")
    pf = trace.p_f
    peak = float(np.max(pf))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(pf - pf[::-1])) / peak)
