"""Three-level ladder system g -> e -> f and its unit convention.

Internally hbar = 1, gamma_e = 1 and every frequency is a detuning
``nu = omega - omega_e`` measured in units of gamma_e; times are in units of
1/gamma_e.  The global phase exp(-2i omega_e t) of the response function is
dropped throughout: it cancels in every modulus the toolkit reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import NegativeDipole, NonPositiveLinewidth

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Rb 5S1/2 -> 5P3/2 -> 5D5/2
RB_LAMBDA_GE = 780e-9
RB_LAMBDA_EF = 776e-9
RB_TAU_E = 26e-9
RB_TAU_F = 232e-9


@dataclass(frozen=True)
class Symmetric:
    """Each field drives both transitions (kernel symmetric under nu_a <-> nu_b)."""

    name = "symmetric"


@dataclass(frozen=True)
class SinglePath:
    """Field 1 drives g-e only, field 2 drives e-f only."""

    name = "single_path"


@dataclass(frozen=True)
class TwoAtom:
    """Two non-interacting two-level atoms, one photon each.

    ``gamma_e2`` is the second atom's linewidth and ``delta_atoms`` its
    transition frequency offset from omega_e, both in units of gamma_e.
    """

    gamma_e2: float = 1.0
    delta_atoms: float = 0.0
    name = "two_atom"


CouplingMode = Union[Symmetric, SinglePath, TwoAtom]


@dataclass(frozen=True)
class LevelSystem:
    gamma_f: float
    delta_cap: float
    mu_ge: float = 1.0
    mu_ef: float = 1.0
    field_norm: float = 1.0
    coupling_mode: CouplingMode = field(default_factory=Symmetric)
    omega_e_abs: Optional[float] = None
    gamma_e: float = 1.0

    @property
    def delta_small(self) -> float:
        """Linewidth deviation gamma_f - 2 gamma_e."""
        return self.gamma_f - 2.0 * self.gamma_e

    @property
    def coupling(self) -> float:
        """Overall prefactor mu_ge * mu_ef * E_0**2 of the two-photon kernel."""
        return self.mu_ge * self.mu_ef * self.field_norm**2

    @property
    def is_harmonic(self) -> bool:
        return self.delta_cap == 0.0 and self.delta_small == 0.0

    def as_dict(self) -> dict:
        mode = self.coupling_mode
        d = {
            "gamma_e": self.gamma_e,
            "gamma_f": self.gamma_f,
            "delta_cap": self.delta_cap,
            "delta_small": self.delta_small,
            "mu_ge": self.mu_ge,
            "mu_ef": self.mu_ef,
            "field_norm": self.field_norm,
            "mode": mode.name,
            "omega_e_abs": self.omega_e_abs,
        }
        if isinstance(mode, TwoAtom):
            d["gamma_e2"] = mode.gamma_e2
            d["delta_atoms"] = mode.delta_atoms
        return d


def make_system(
    gamma_f: float,
    delta_cap: float,
    mu_ge: float = 1.0,
    mu_ef: float = 1.0,
    coupling_mode: Optional[CouplingMode] = None,
    field_norm: float = 1.0,
    omega_e_abs: Optional[float] = None,
) -> LevelSystem:
    """Validate parameters and build a :class:`LevelSystem` with gamma_e = 1."""
    if coupling_mode is None:
        coupling_mode = Symmetric()
    if not (math.isfinite(gamma_f) and gamma_f > 0):
        raise NonPositiveLinewidth(
            f"gamma_f must be > 0 (got {gamma_f}); equivalently delta = gamma_f - 2 > -2"
        )
    if not math.isfinite(delta_cap):
        raise ValueError(f"delta_cap must be finite (got {delta_cap})")
    for label, mu in (("mu_ge", mu_ge), ("mu_ef", mu_ef)):
        if not mu >= 0:
            raise NegativeDipole(f"{label} must be >= 0 (got {mu})")
    if not field_norm > 0:
        raise ValueError(f"field_norm must be > 0 (got {field_norm})")
    if isinstance(coupling_mode, TwoAtom) and not coupling_mode.gamma_e2 > 0:
        raise NonPositiveLinewidth(
            f"gamma_e2 must be > 0 (got {coupling_mode.gamma_e2})"
        )
    return LevelSystem(
        gamma_f=float(gamma_f),
        delta_cap=float(delta_cap),
        mu_ge=float(mu_ge),
        mu_ef=float(mu_ef),
        field_norm=float(field_norm),
        coupling_mode=coupling_mode,
        omega_e_abs=omega_e_abs,
    )


def from_detunings(delta_cap: float, delta_small: float, **kwargs) -> LevelSystem:
    """Build a system from the (Delta, delta) coordinates of the enhancement map."""
    return make_system(2.0 + delta_small, delta_cap, **kwargs)


def from_rubidium(**kwargs) -> LevelSystem:
    """The 5S1/2 -> 5P3/2 -> 5D5/2 ladder of rubidium in internal units."""
    omega_ge = 2 * math.pi * SPEED_OF_LIGHT / RB_LAMBDA_GE
    omega_fe = 2 * math.pi * SPEED_OF_LIGHT / RB_LAMBDA_EF
    delta_cap = (omega_fe - omega_ge) * RB_TAU_E
    gamma_f = RB_TAU_E / RB_TAU_F
    return make_system(gamma_f, delta_cap, omega_e_abs=omega_ge, **kwargs)
