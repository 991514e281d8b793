"""Frequency grids with quadrature weights.

Two families are provided: the trapezoid rule on a uniform grid, and graded
grids built from tangent-mapped clusters ``nu = c + s * tan(u)`` with ``u``
uniform.  The tangent map turns a Lorentzian of width ``s`` centred at ``c``
into a constant integrand in ``u``, which is what makes resonances separated
by ~1e5 linewidths tractable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadGridSpec, OverlapWarning
from .model import LevelSystem, SinglePath, TwoAtom

DEFAULT_TAIL_CUT = 1.55


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise BadGridSpec("nodes and weights must be 1-d arrays of equal length")
        if len(nodes) < 2:
            raise BadGridSpec("a grid needs at least 2 nodes")
        if not np.all(np.isfinite(nodes)) or not np.all(np.diff(nodes) > 0):
            raise BadGridSpec("nodes must be finite and strictly increasing")
        if not np.all(weights > 0):
            raise BadGridSpec("weights must be positive")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def same_as(self, other: "FrequencyGrid") -> bool:
        return self is other or (
            np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)

    def describe(self) -> dict:
        return {"n": len(self), "lo": float(self.nodes[0]), "hi": float(self.nodes[-1]), **self.meta}


def uniform_grid(center: float, halfwidth: float, n: int) -> FrequencyGrid:
    """Trapezoid rule on ``[center - halfwidth, center + halfwidth]``."""
    if int(n) != n or n < 2:
        raise BadGridSpec(f"uniform grid needs n >= 2 (got {n})")
    if not halfwidth > 0:
        raise BadGridSpec(f"halfwidth must be > 0 (got {halfwidth})")
    n = int(n)
    # symmetric offsets so that center + k*h and center - k*h are exact mirrors
    offsets = halfwidth * np.linspace(-1.0, 1.0, n)
    offsets = 0.5 * (offsets - offsets[::-1])
    h = 2.0 * halfwidth / (n - 1)
    weights = np.full(n, h)
    weights[[0, -1]] *= 0.5
    meta = {"kind": "uniform", "center": center, "halfwidth": halfwidth, "n_requested": n}
    return FrequencyGrid(center + offsets, weights, meta)


def _cluster_nodes(center, scale, n, u_lo, u_hi):
    u = np.linspace(u_lo, u_hi, n)
    du = (u_hi - u_lo) / (n - 1)
    nodes = center + scale * np.tan(u)
    weights = scale * du / np.cos(u) ** 2
    weights[[0, -1]] *= 0.5
    return nodes, weights


def graded_grid(
    clusters: Sequence[tuple[float, float, int]],
    tail_cut: float = DEFAULT_TAIL_CUT,
    tail_correction: bool = True,
) -> FrequencyGrid:
    """Union of tangent-mapped clusters ``(center, scale, n)``.

    Each cluster places ``n`` nodes at ``center + scale * tan(u)`` with ``u``
    uniform on ``[-tail_cut, tail_cut]`` and weights ``scale * sec(u)**2 * du``
    (trapezoid in ``u``).  With ``tail_correction`` the two outermost weights
    additionally absorb the integral of a ``nu**-2`` tail beyond the last node,
    which integrates Lorentzian tails exactly to leading order.  Turn it off
    when integrands still have narrow structure near the grid ends.

    Clusters whose intervals overlap are split at the scale-weighted midpoint
    of their centres, so no interval is counted twice; an
    :class:`OverlapWarning` is issued and recorded in ``meta["warnings"]``.
    """
    if len(clusters) == 0:
        raise BadGridSpec("graded grid needs at least one cluster")
    if not 0 < tail_cut < math.pi / 2:
        raise BadGridSpec(f"tail_cut must lie in (0, pi/2) (got {tail_cut})")
    cl = []
    for c in clusters:
        try:
            center, scale, n = c
        except (TypeError, ValueError):
            raise BadGridSpec(f"cluster must be (center, scale, n), got {c!r}") from None
        if not (math.isfinite(center) and scale > 0 and math.isfinite(scale)):
            raise BadGridSpec(f"cluster scale must be finite and > 0 (got {scale})")
        if int(n) != n or n < 8:
            raise BadGridSpec(f"cluster needs n >= 8 nodes (got {n})")
        cl.append((float(center), float(scale), int(n)))
    cl.sort(key=lambda c: c[0])

    reach = math.tan(tail_cut)
    u_lo = [-tail_cut] * len(cl)
    u_hi = [tail_cut] * len(cl)
    notes = []
    for k in range(len(cl) - 1):
        (c1, s1, _), (c2, s2, _) = cl[k], cl[k + 1]
        if c2 - c1 <= 1e-12 * max(s1, s2):
            raise BadGridSpec(f"clusters at {c1} and {c2} share a centre")
        if c1 + s1 * reach > c2 - s2 * reach:
            split = (c1 * s2 + c2 * s1) / (s1 + s2)
            u_hi[k] = min(u_hi[k], math.atan((split - c1) / s1))
            u_lo[k + 1] = max(u_lo[k + 1], math.atan((split - c2) / s2))
            msg = f"OverlapWarning: clusters at {c1:g} and {c2:g} overlap; split at {split:.17g}"
            notes.append(msg)
            warnings.warn(msg, OverlapWarning, stacklevel=2)

    parts_x, parts_w, parts_s = [], [], []
    for k, (center, scale, n) in enumerate(cl):
        if u_hi[k] - u_lo[k] <= 0:
            raise BadGridSpec(f"cluster at {center} is swallowed by its neighbours")
        x, w = _cluster_nodes(center, scale, n, u_lo[k], u_hi[k])
        if tail_correction and k == 0:
            w[0] += scale * reach
        if tail_correction and k == len(cl) - 1:
            w[-1] += scale * reach
        parts_x.append(x)
        parts_w.append(w)
        parts_s.append(np.full(n, scale))
    x = np.concatenate(parts_x)
    w = np.concatenate(parts_w)
    s = np.concatenate(parts_s)
    order = np.argsort(x, kind="stable")
    x, w, s = x[order], w[order], s[order]

    # coincident nodes (shared split points) keep one node with summed weight
    keep_x, keep_w = [x[0]], [w[0]]
    for xi, wi, si in zip(x[1:], w[1:], s[1:]):
        if xi - keep_x[-1] <= max(1e-12 * si, 16 * np.finfo(float).eps * abs(xi)):
            keep_w[-1] += wi
        else:
            keep_x.append(xi)
            keep_w.append(wi)
    meta = {
        "kind": "graded",
        "clusters": [list(c) for c in cl],
        "tail_cut": tail_cut,
        "tail_correction": tail_correction,
        "warnings": notes,
    }
    return FrequencyGrid(np.array(keep_x), np.array(keep_w), meta)


def quad_check(grid: FrequencyGrid, gamma: float, center: float = 0.0) -> float:
    """Quadrature of ``|1/(nu - center + i gamma)|**2``; the exact value is pi/gamma."""
    if not gamma > 0:
        raise BadGridSpec(f"gamma must be > 0 (got {gamma})")
    f = 1.0 / ((grid.nodes - center) ** 2 + gamma**2)
    return float(np.dot(grid.weights, f))


def reference_grid(system: LevelSystem, n: int = 801) -> FrequencyGrid:
    """Graded grid suited to the system, used when no grid is configured.

    Moderate detunings get one wide cluster between the two resonances; large
    detunings get one cluster per resonance (see :func:`resonance_pair_grid`).
    """
    mode = system.coupling_mode
    if isinstance(mode, TwoAtom):
        lo, hi = sorted((0.0, mode.delta_atoms))
        width = max(1.0, mode.gamma_e2)
        if hi - lo > 200 * width:
            return graded_grid([(0.0, 1.0, n), (mode.delta_atoms, mode.gamma_e2, n)])
        return graded_grid([(0.5 * (lo + hi), 10.0 * width, n)])
    if isinstance(mode, SinglePath):
        # the line nu_b = Delta - nu_a must stay resolved wherever 1/(nu_a + i)
        # has weight, so keep the spacing near-uniform out to +-80 around both
        half = 80.0 + 0.5 * abs(system.delta_cap)
        return graded_grid(
            [(0.5 * system.delta_cap, 0.5 * half, n)], tail_cut=math.atan(2.0), tail_correction=False
        )
    if abs(system.delta_cap) <= 10:
        return graded_grid([(0.5 * system.delta_cap, 10.0, n)])
    return resonance_pair_grid(system.delta_cap, reach=80.0, n=n)


def resonance_pair_grid(delta_cap: float, reach: float, n: int) -> FrequencyGrid:
    """Two clusters at 0 and ``delta_cap`` each covering ``+-reach``.

    Scale ``reach/2`` with ``tail_cut = atan 2`` keeps the node spacing within a
    factor 5 of uniform across each window, so the narrow two-photon line
    ``nu_a + nu_b = Delta`` stays resolved wherever the single-photon
    Lorentzians carry weight.  No tail correction: the line reaches the window
    edges.  Windows that overlap are split silently (still noted in ``meta``).
    """
    scale = 0.5 * reach
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OverlapWarning)
        return graded_grid(
            [(0.0, scale, n), (delta_cap, scale, n)],
            tail_cut=math.atan(2.0),
            tail_correction=False,
        )
