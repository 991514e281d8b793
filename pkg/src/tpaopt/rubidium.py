"""Rubidium ladder: convergence study of the enhancement factor.

At Delta ~ 3.2e5 linewidths the kernel splits into two mirror-image blocks,
(nu_a ~ 0, nu_b ~ Delta) and its transpose, joined by the narrow two-photon
line nu_a + nu_b = Delta.  Each block is discretized by one tangent-mapped
cluster per resonance that covers +-reach around it.  Truncating at +-reach
drops Lorentzian tail weight ~ 1/reach, so E approaches its limit like
1/reach; the study doubles reach at fixed node density and extrapolates.

An independent route is :func:`large_detuning_limit`: for Delta -> infinity
the nu_b integral of a block can be done in closed form,
  int db / ((a + b' + i g)(a' + b' - i g)) = 2 pi i / (a - a' + 2 i g),
so r_k^2 are the eigenvalues of a Hermitian operator on the nu_a axis
alone.  Every r_k appears twice (once per block).
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .grid import graded_grid, resonance_pair_grid
from .model import LevelSystem, from_rubidium
from .optimal import analytic_norm, enhancement_from_values
from .response import build_kernel
from .schmidt import singular_values

# (reach, nodes per cluster): node density fixed at 20 per unit reach
STUDY_LEVELS = ((20.0, 401), (40.0, 801), (80.0, 1601))
DEFAULT_BAND = (8.5, 9.8)


@dataclass
class StudyLevel:
    reach: float
    nodes_per_cluster: int
    total_nodes: int
    r1: float
    r2: float
    sum_rk2: float
    E: float
    norm_ratio: float
    elapsed_s: float


@dataclass
class RubidiumReport:
    system: dict
    levels: list[StudyLevel]
    E_finest: float
    E_extrapolated: float
    E_large_detuning_limit: float
    band: tuple[float, float]
    in_band: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["band"] = list(self.band)
        return d


def study_level(system: LevelSystem, reach: float, n: int) -> StudyLevel:
    start = time.perf_counter()
    g = resonance_pair_grid(system.delta_cap, reach=reach, n=n)
    r = singular_values(build_kernel(system, g, g))
    r = r[r >= 1e-12 * r[0]]
    return StudyLevel(
        reach=reach,
        nodes_per_cluster=n,
        total_nodes=len(g),
        r1=float(r[0]),
        r2=float(r[1]),
        sum_rk2=float(np.sum(r**2)),
        E=enhancement_from_values(r),
        norm_ratio=float(np.sum(r**2)) / analytic_norm(system),
        elapsed_s=time.perf_counter() - start,
    )


def large_detuning_limit(gamma_f: float, n: int = 1600, tail_cut: float = 1.5705) -> float:
    """E for Delta -> infinity from the reduced one-axis eigenproblem."""
    g = graded_grid([(0.0, 1.0, n)], tail_cut=tail_cut, tail_correction=False)
    x, sw = g.nodes, g.sqrt_weights
    lor = 1.0 / (x + 1j)
    h = 2j * math.pi / (x[:, None] - x[None, :] + 2j * gamma_f)
    op = (sw * lor)[:, None] * h * np.conj(sw * lor)[None, :]
    top = float(np.linalg.eigvalsh(op)[-1])
    # each block carries iint |T|^2 = pi * pi/gamma_f; both blocks share the spectrum
    block_norm = math.pi * math.pi / gamma_f
    return float(2.0 * block_norm / top)


def rubidium_study(
    levels=STUDY_LEVELS,
    band: tuple[float, float] = DEFAULT_BAND,
    system: LevelSystem | None = None,
) -> RubidiumReport:
    system = from_rubidium() if system is None else system
    done = [study_level(system, reach, n) for reach, n in levels]
    finest = done[-1].E
    extrap = finest
    if len(done) >= 2:
        a, b = done[-2], done[-1]
        # E(reach) ~ E_inf - c/reach
        extrap = (b.E * b.reach - a.E * a.reach) / (b.reach - a.reach)
    limit = large_detuning_limit(system.gamma_f)
    notes = [
        "E approaches its limit from below like 1/reach (truncated Lorentzian tails)",
        f"tau_e/tau_f = {system.gamma_f:.6g} fixes gamma_f; E depends on gamma_f and Delta only",
    ]
    return RubidiumReport(
        system=system.as_dict(),
        levels=done,
        E_finest=finest,
        E_extrapolated=float(extrap),
        E_large_detuning_limit=limit,
        band=tuple(band),
        in_band=bool(band[0] <= finest <= band[1]),
        notes=notes,
    )
