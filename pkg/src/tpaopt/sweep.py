"""Enhancement factor over the (Delta, delta) plane."""

from __future__ import annotations

import concurrent.futures
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import ConfigError, EmptySweep, NonPositiveLinewidth, TpaOptError
from .grid import uniform_grid
from .model import from_detunings
from .optimal import enhancement_from_values
from .response import build_kernel
from .schmidt import singular_values


@dataclass(frozen=True)
class AxisRange:
    lo: float
    hi: float
    count: int

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.lo)])
        v = np.linspace(self.lo, self.hi, self.count)
        # keep exact zeros exact so the harmonic point is hit
        v[np.abs(v) < 1e-12 * (abs(self.hi) + abs(self.lo))] = 0.0
        return v


@dataclass(frozen=True)
class WindowGrid:
    """Per-point uniform grid covering both resonances plus ``margin`` on each side."""

    margin: float = 25.0
    n: int = 601

    def for_point(self, delta_cap: float):
        lo = min(0.0, delta_cap) - self.margin
        hi = max(0.0, delta_cap) + self.margin
        return uniform_grid(0.5 * (lo + hi), 0.5 * (hi - lo), self.n)


@dataclass(frozen=True)
class SweepSpec:
    delta_cap_range: AxisRange = AxisRange(-10.0, 10.0, 41)
    delta_small_range: AxisRange = AxisRange(-1.8, 8.1, 34)
    grid: WindowGrid = WindowGrid()
    t: float = 0.0

    def __post_init__(self):
        for label, ax in (("delta_cap", self.delta_cap_range), ("delta_small", self.delta_small_range)):
            if int(ax.count) != ax.count or ax.count < 1:
                raise ConfigError(f"{label} count must be >= 1 (got {ax.count})")
            if ax.count > 1 and not ax.hi > ax.lo:
                raise ConfigError(f"{label} range needs max > min")
        if min(self.delta_small_range.lo, self.delta_small_range.hi) <= -2.0:
            raise NonPositiveLinewidth(
                "delta_small must stay above -2: gamma_f = 2 + delta must be positive "
                f"(got delta_min = {min(self.delta_small_range.lo, self.delta_small_range.hi)})"
            )

    def points(self) -> list[tuple[float, float]]:
        return [
            (float(D), float(d))
            for D in self.delta_cap_range.values()
            for d in self.delta_small_range.values()
        ]


@dataclass(frozen=True)
class SweepRow:
    delta_cap: float
    delta_small: float
    r1: float
    r2: float
    sum_rk2: float
    E: float
    ok: bool = True
    error: str = ""


@dataclass
class SweepResult:
    rows: list[SweepRow]
    spec: SweepSpec
    meta: dict = field(default_factory=dict)

    CSV_HEADER = "delta_cap,delta_small,r1,sum_rk2,E"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for row in self.rows:
            vals = (row.delta_cap, row.delta_small, row.r1, row.sum_rk2, row.E)
            buf.write(",".join(format(float(v), ".17g") for v in vals) + "\n")
        return buf.getvalue()

    def table(self) -> np.ndarray:
        """E reshaped to (n_delta_cap, n_delta_small)."""
        shape = (self.spec.delta_cap_range.count, self.spec.delta_small_range.count)
        return np.array([row.E for row in self.rows], dtype=float).reshape(shape)


def sweep_point(delta_cap: float, delta_small: float, grid: WindowGrid, t: float = 0.0) -> SweepRow:
    try:
        with threadpool_limits(limits=1):
            system = from_detunings(delta_cap, delta_small)
            g = grid.for_point(delta_cap)
            r = singular_values(build_kernel(system, g, g, t))
        r = r[r >= 1e-12 * r[0]] if r.size and r[0] > 0 else r
        return SweepRow(
            delta_cap, delta_small,
            r1=float(r[0]),
            r2=float(r[1]) if len(r) > 1 else 0.0,
            sum_rk2=float(np.sum(r**2)),
            E=enhancement_from_values(r),
        )
    except (TpaOptError, np.linalg.LinAlgError, ValueError, IndexError) as exc:
        nan = math.nan
        return SweepRow(delta_cap, delta_small, nan, nan, nan, nan, ok=False, error=f"{type(exc).__name__}: {exc}")


def _point_star(args):
    return sweep_point(*args)


def run_sweep(
    spec: SweepSpec,
    workers: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SweepResult:
    """Evaluate every point; rows come back Delta-major regardless of scheduling."""
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1 (got {workers})")
    jobs = [(D, d, spec.grid, spec.t) for D, d in spec.points()]
    start = time.perf_counter()
    rows: list[SweepRow] = []
    if workers == 1:
        for k, job in enumerate(jobs):
            rows.append(_point_star(job))
            if progress:
                progress(k + 1, len(jobs))
    else:
        chunk = max(1, len(jobs) // (8 * workers))
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for k, row in enumerate(pool.map(_point_star, jobs, chunksize=chunk)):
                rows.append(row)
                if progress:
                    progress(k + 1, len(jobs))
    meta = {
        "grid": asdict(spec.grid),
        "workers": workers,
        "points": len(jobs),
        "failed": sum(not r.ok for r in rows),
        "elapsed_s": time.perf_counter() - start,
    }
    return SweepResult(rows, spec, meta)


def stderr_progress(done: int, total: int) -> None:
    if done == total or done % max(1, total // 20) == 0:
        print(f"sweep: {done}/{total} points", file=sys.stderr, flush=True)


@dataclass
class SweepSummary:
    argmin: tuple[float, float]
    min_E: float
    below_one: int
    convexity_violations: int
    convexity_tolerance: float
    max_convexity_excess: float
    violations_along_delta_cap: int
    violations_along_delta_small: int
    monotonicity_violations: int
    mirror_asymmetry: float
    failed_points: int

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def analyze_sweep(res: SweepResult, tol: float = 1e-3) -> SweepSummary:
    """Minimum, E >= 1 check, and axis-aligned midpoint-convexity diagnostics.

    ``monotonicity_violations`` counts steps along either axis that move away
    from the minimum while E decreases by more than ``tol`` (a unimodality
    check, weaker than convexity).  ``mirror_asymmetry`` is
    ``max |E(D, d) - E(-D, d)|`` when the Delta axis is symmetric, else NaN.
    """
    if not res.rows:
        raise EmptySweep("sweep has no rows")
    E = res.table()
    Ds = res.spec.delta_cap_range.values()
    ds = res.spec.delta_small_range.values()
    finite = np.isfinite(E)
    if not finite.any():
        raise EmptySweep("every sweep point failed")
    masked = np.where(finite, E, np.inf)
    i, j = np.unravel_index(np.argmin(masked), E.shape)
    below = int(np.count_nonzero(E[finite] < 1.0 - 1e-9))

    along_D = E[1:-1, :] - 0.5 * (E[:-2, :] + E[2:, :]) if E.shape[0] >= 3 else np.empty((0, E.shape[1]))
    along_d = E[:, 1:-1] - 0.5 * (E[:, :-2] + E[:, 2:]) if E.shape[1] >= 3 else np.empty((E.shape[0], 0))
    vD = int(np.count_nonzero(np.nan_to_num(along_D, nan=-np.inf) > tol))
    vd = int(np.count_nonzero(np.nan_to_num(along_d, nan=-np.inf) > tol))
    excess = [float(a.max()) for a in (along_D, along_d) if a.size and np.isfinite(a).any()]

    mono = 0
    for row in range(E.shape[0]):
        for col in range(E.shape[1]):
            if col > j and E[row, col] < E[row, col - 1] - tol:
                mono += 1
            if col < j and E[row, col] < E[row, col + 1] - tol:
                mono += 1
            if row > i and E[row, col] < E[row - 1, col] - tol:
                mono += 1
            if row < i and E[row, col] < E[row + 1, col] - tol:
                mono += 1

    mirror = math.nan
    if np.allclose(Ds, -Ds[::-1], atol=1e-12):
        mirror = float(np.nanmax(np.abs(E - E[::-1, :])))

    return SweepSummary(
        argmin=(float(Ds[i]), float(ds[j])),
        min_E=float(E[i, j]),
        below_one=below,
        convexity_violations=vD + vd,
        convexity_tolerance=tol,
        max_convexity_excess=max(excess) if excess else 0.0,
        violations_along_delta_cap=vD,
        violations_along_delta_small=vd,
        monotonicity_violations=mono,
        mirror_asymmetry=mirror,
        failed_points=int(np.count_nonzero(~finite)),
    )
