"""Two-photon response kernel T_t(nu_a, nu_b) and its on-disk formats."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import OutOfMemory
from .grid import FrequencyGrid
from .model import LevelSystem, SinglePath, Symmetric, TwoAtom

MAX_KERNEL_ENTRIES = 25_000_000


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    values: np.ndarray
    grid_a: FrequencyGrid
    grid_b: FrequencyGrid
    t: float
    system: LevelSystem

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def shared_grid(self) -> bool:
        return self.grid_a.same_as(self.grid_b)

    def weighted(self) -> np.ndarray:
        """Nystrom matrix ``sqrt(w_a) T sqrt(w_b)``."""
        return self.grid_a.sqrt_weights[:, None] * self.values * self.grid_b.sqrt_weights[None, :]

    def norm2(self) -> float:
        """Quadrature double integral of |T|**2."""
        mag2 = self.values.real**2 + self.values.imag**2
        return float(self.grid_a.weights @ mag2 @ self.grid_b.weights)


def response_at(sys: LevelSystem, nu_a, nu_b, t: float = 0.0):
    """Evaluate the kernel at detunings ``nu_a``, ``nu_b`` (broadcasting)."""
    nu_a = np.asarray(nu_a, dtype=float)
    nu_b = np.asarray(nu_b, dtype=float)
    mode = sys.coupling_mode
    if isinstance(mode, TwoAtom):
        val = 1.0 / ((nu_a + 1j * sys.gamma_e) * (nu_b - mode.delta_atoms + 1j * mode.gamma_e2))
    else:
        first = 1.0 / (nu_a + 1j * sys.gamma_e)
        if isinstance(mode, Symmetric):
            first = first + 1.0 / (nu_b + 1j * sys.gamma_e)
        elif not isinstance(mode, SinglePath):
            raise TypeError(f"unknown coupling mode {mode!r}")
        val = first / (nu_a + nu_b - sys.delta_cap + 1j * sys.gamma_f)
    if t != 0:
        val = val * np.exp(-1j * (nu_a + nu_b) * t)
    return sys.coupling * val


def build_kernel(
    sys: LevelSystem,
    grid_a: FrequencyGrid,
    grid_b: FrequencyGrid | None = None,
    t: float = 0.0,
    max_entries: int = MAX_KERNEL_ENTRIES,
) -> KernelMatrix:
    if grid_b is None:
        grid_b = grid_a
    entries = len(grid_a) * len(grid_b)
    if entries > max_entries:
        raise OutOfMemory(
            f"kernel of {len(grid_a)}x{len(grid_b)} = {entries} entries exceeds cap {max_entries}"
        )
    values = response_at(sys, grid_a.nodes[:, None], grid_b.nodes[None, :], t)
    values.flags.writeable = False
    return KernelMatrix(values, grid_a, grid_b, float(t), sys)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def dump_kernel(kernel: KernelMatrix, path) -> tuple[Path, Path]:
    """Write ``<path>.bin`` (row-major little-endian complex128) and ``<path>.hdr``."""
    path = Path(path)
    bin_path = path.with_suffix(".bin")
    hdr_path = path.with_suffix(".hdr")
    np.ascontiguousarray(kernel.values, dtype="<c16").tofile(bin_path)
    rows, cols = kernel.shape
    lines = [
        "format=tpaopt-kernel-1",
        "dtype=complex128-le-rowmajor",
        f"rows={rows}",
        f"cols={cols}",
        f"t={_fmt(kernel.t)}",
        "system=" + json.dumps(kernel.system.as_dict(), sort_keys=True),
    ]
    for label, g in (("a", kernel.grid_a), ("b", kernel.grid_b)):
        lines.append(f"grid_{label}.nodes=" + ",".join(_fmt(v) for v in g.nodes))
        lines.append(f"grid_{label}.weights=" + ",".join(_fmt(v) for v in g.weights))
    hdr_path.write_text("\n".join(lines) + "\n")
    return bin_path, hdr_path


def load_kernel_dump(path) -> dict:
    """Read back a dump written by :func:`dump_kernel` as plain arrays."""
    path = Path(path)
    header = {}
    for line in path.with_suffix(".hdr").read_text().splitlines():
        key, _, value = line.partition("=")
        header[key] = value
    rows, cols = int(header["rows"]), int(header["cols"])
    values = np.fromfile(path.with_suffix(".bin"), dtype="<c16").reshape(rows, cols)
    out = {"values": values, "t": float(header["t"]), "system": json.loads(header["system"])}
    for label in ("a", "b"):
        out[f"nodes_{label}"] = np.array(header[f"grid_{label}.nodes"].split(","), dtype=float)
        out[f"weights_{label}"] = np.array(header[f"grid_{label}.weights"].split(","), dtype=float)
    return out
