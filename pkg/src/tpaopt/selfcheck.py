"""Fast invariant checks on small grids, used by ``tpa-opt selfcheck``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import graded_grid, quad_check, reference_grid
from .model import TwoAtom, make_system
from .optimal import analytic_norm, coefficient_prob, optimize
from .response import build_kernel
from .schmidt import decompose, schmidt_residual, singular_values


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    value: float
    limit: float


def _harmonic(rng):
    sys = make_system(2.0, 0.0)
    r = singular_values(build_kernel(sys, reference_grid(sys, 301)))
    return r[1] / r[0], 1e-6


def _norm(rng):
    sys = make_system(1.0, 5.0)
    k = build_kernel(sys, reference_grid(sys, 401))
    return abs(k.norm2() / analytic_norm(sys) - 1.0), 5e-3


def _quadrature(rng):
    return abs(quad_check(graded_grid([(0.0, 1.0, 401)]), 1.0) / math.pi - 1.0), 1e-4


def _residuals(rng):
    sys = make_system(0.5, 5.0)
    k = build_kernel(sys, reference_grid(sys, 301))
    sd = decompose(k)
    res = optimize(k, sd)
    return max(res.residual_classical, res.residual_quantum), 1e-8


def _reconstruction(rng):
    sys = make_system(0.5, 5.0)
    k = build_kernel(sys, reference_grid(sys, 301))
    sd = decompose(k)
    return schmidt_residual(k, sd, sd.rank), 1e-8


def _maximality(rng):
    sys = make_system(0.5, 5.0)
    k = build_kernel(sys, reference_grid(sys, 201))
    sd = decompose(k)
    bound = sd.r[0] ** 2
    worst = 0.0
    m = min(sd.rank, 12)
    for _ in range(200):
        c = rng.normal(size=m) + 1j * rng.normal(size=m)
        d = rng.normal(size=m) + 1j * rng.normal(size=m)
        c /= np.linalg.norm(c)
        d /= np.linalg.norm(d)
        worst = max(worst, coefficient_prob(sd, c, d) / bound - 1.0)
    return max(worst, 0.0), 1e-12


def _two_atom(rng):
    sys = make_system(1.0, 0.0, coupling_mode=TwoAtom(gamma_e2=1.7, delta_atoms=2.5))
    r = singular_values(build_kernel(sys, reference_grid(sys, 301)))
    return r[1] / r[0], 1e-10


def _time_invariance(rng):
    sys = make_system(0.5, 5.0)
    g = reference_grid(sys, 201)
    r0 = singular_values(build_kernel(sys, g, t=0.0))[:5]
    r5 = singular_values(build_kernel(sys, g, t=5.0))[:5]
    return float(np.max(np.abs(r5 / r0 - 1.0))), 1e-8


CHECKS: dict[str, Callable] = {
    "harmonic_rank_one": _harmonic,
    "analytic_normalization": _norm,
    "lorentzian_quadrature": _quadrature,
    "fixed_point_residuals": _residuals,
    "schmidt_reconstruction": _reconstruction,
    "classical_maximality": _maximality,
    "two_atom_rank_one": _two_atom,
    "time_invariance": _time_invariance,
}


def run_selfcheck(seed: int = 12345) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS.items():
        value, limit = fn(rng)
        value = float(value)
        out.append(CheckResult(name, bool(math.isfinite(value) and value <= limit), value, float(limit)))
    return out
