"""Continuum Schmidt decomposition of the response kernel.

The kernel is written as ``T(a, b) = sum_k r_k conj(psi_k(a)) conj(phi_k(b))``
with quadrature-orthonormal mode functions.  Discretization follows the
Nystrom recipe: the SVD is taken of ``sqrt(w_a) conj(T) sqrt(w_b)`` and the
singular vectors are divided by ``sqrt(w)`` again, so ``r_k`` approximate the
singular values of the integral operator rather than of the raw matrix.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BadRank, NumericalFailure
from .grid import FrequencyGrid
from .model import LevelSystem
from .response import KernelMatrix

DROP_RATIO = 1e-12
DEGENERACY_RATIO = 1e-10


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    r: np.ndarray
    psi: np.ndarray  # (rank, len(grid_a))
    phi: np.ndarray  # (rank, len(grid_b))
    grid_a: FrequencyGrid
    grid_b: FrequencyGrid
    t: float
    system: LevelSystem

    @property
    def rank(self) -> int:
        return len(self.r)

    @property
    def sum_r2(self) -> float:
        return float(np.sum(self.r**2))

    def reconstruct(self, m: int | None = None) -> np.ndarray:
        """Kernel rebuilt from the leading ``m`` modes."""
        m = self.rank if m is None else m
        return (np.conj(self.psi[:m]).T * self.r[:m]) @ np.conj(self.phi[:m])


def _svd(matrix: np.ndarray, compute_uv: bool = True):
    for driver in ("gesdd", "gesvd"):
        try:
            return scipy.linalg.svd(
                matrix, full_matrices=False, compute_uv=compute_uv,
                check_finite=True, lapack_driver=driver,
            )
        except np.linalg.LinAlgError:
            continue
        except ValueError as exc:
            raise NumericalFailure(f"kernel has non-finite entries: {exc}") from exc
    raise NumericalFailure("SVD did not converge with gesdd or gesvd")


def singular_values(kernel: KernelMatrix) -> np.ndarray:
    """Schmidt coefficients only (no mode functions), descending."""
    return _svd(kernel.weighted(), compute_uv=False)


def _degenerate_order(r, psi, r1):
    """Within (near-)degenerate blocks order modes by first differing node of |psi|."""
    order = list(range(len(r)))
    tol = DEGENERACY_RATIO * r1

    def cmp(i, j):
        a, b = np.abs(psi[i]), np.abs(psi[j])
        diff = np.nonzero(np.abs(a - b) > 1e-12 * max(a.max(), b.max()))[0]
        if len(diff) == 0:
            return 0
        k = diff[0]
        return -1 if a[k] > b[k] else 1

    start = 0
    while start < len(r):
        stop = start + 1
        while stop < len(r) and r[stop - 1] - r[stop] < tol:
            stop += 1
        if stop - start > 1:
            order[start:stop] = sorted(order[start:stop], key=functools.cmp_to_key(cmp))
        start = stop
    return np.array(order)


def decompose(kernel: KernelMatrix) -> SchmidtDecomposition:
    sa = kernel.grid_a.sqrt_weights
    sb = kernel.grid_b.sqrt_weights
    m = sa[:, None] * np.conj(kernel.values) * sb[None, :]
    u, s, vh = _svd(m)
    if s.size == 0 or not s[0] > 0:
        keep = 0
    else:
        keep = int(np.count_nonzero(s >= DROP_RATIO * s[0]))
    r = s[:keep].copy()
    psi = u[:, :keep].T / sa[None, :]
    phi = vh[:keep] / sb[None, :]

    # largest-modulus sample of psi_k real positive; phi_k takes the inverse phase
    idx = np.argmax(np.abs(psi), axis=1)
    ph = psi[np.arange(keep), idx]
    ph = ph / np.abs(ph)
    psi = psi * np.conj(ph)[:, None]
    phi = phi * ph[:, None]

    if keep > 1:
        order = _degenerate_order(r, psi, r[0])
        r, psi, phi = r[order], psi[order], phi[order]
    for arr in (r, psi, phi):
        arr.flags.writeable = False
    return SchmidtDecomposition(r, psi, phi, kernel.grid_a, kernel.grid_b, kernel.t, kernel.system)


def schmidt_residual(kernel: KernelMatrix, sd: SchmidtDecomposition, m: int) -> float:
    """Weighted Frobenius error of the rank-``m`` truncation relative to ||T||."""
    if int(m) != m or not 1 <= m <= sd.rank:
        raise BadRank(f"m must be in [1, {sd.rank}] (got {m})")
    diff = kernel.values - sd.reconstruct(int(m))
    wa, wb = kernel.grid_a.weights, kernel.grid_b.weights
    num = wa @ (diff.real**2 + diff.imag**2) @ wb
    return float(np.sqrt(num / kernel.norm2()))


def orthonormality_error(values: np.ndarray, grid: FrequencyGrid) -> float:
    """max |<f_k, f_l>_w - delta_kl| over the rows of ``values``."""
    gram = (np.conj(values) * grid.weights[None, :]) @ values.T
    return float(np.max(np.abs(gram - np.eye(len(values)))))
