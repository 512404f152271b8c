"""Rydberg-array Hamiltonian over the 2**N occupation basis.

    H = sum_i (Ω/2) (e^{iφ} |g_i><r_i| + e^{-iφ} |r_i><g_i|) - Δ sum_i n_i + sum_{i<j} V_ij n_i n_j
    V_ij = Ω R_b^6 / r_ij^6

Units: angular frequencies in rad/μs, lengths in μm. All pair terms are kept,
there is no interaction cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import basis
from .errors import InvalidArgumentError, ResourceLimitError
from .lattice import Geometry

__all__ = [
    "DriveParams",
    "HamiltonianMatrix",
    "RydbergOperator",
    "DENSE_CAP",
    "SPARSE_CAP",
    "interaction",
    "interaction_matrix",
    "build",
]

DENSE_CAP = 14
SPARSE_CAP = 24
# cached CSR drive up to this size, reshaped slicing beyond
CSR_CAP = 16


@dataclass(frozen=True)
class DriveParams:
    """Drive and interaction parameters.

    The van der Waals coefficient is derived as ``omega * r_b**6`` and is
    never stored on its own.
    """

    omega: float = 5 * np.pi
    delta: float = 17.5 * np.pi
    phi: float = 0.0
    r_b: float = 8.375

    def __post_init__(self):
        if self.omega < 0:
            raise InvalidArgumentError("omega must be >= 0")
        if not self.r_b > 0:
            raise InvalidArgumentError("r_b must be > 0")

    @property
    def c6(self) -> float:
        return self.omega * self.r_b**6

    @classmethod
    def from_ratio(cls, delta_over_omega: float, omega: float = 5 * np.pi, r_b: float = 8.375):
        return cls(omega=omega, delta=delta_over_omega * omega, r_b=r_b)


def interaction(r_ij: float, params: DriveParams) -> float:
    """Pair interaction ``omega * (r_b / r_ij)**6``."""
    if not r_ij > 0:
        raise InvalidArgumentError("interaction distance must be > 0")
    return params.omega * (params.r_b / r_ij) ** 6


def interaction_matrix(geometry: Geometry, c6: float) -> np.ndarray:
    """Symmetric ``V_ij = c6 / r_ij**6`` with zero diagonal."""
    d = geometry.distances()
    v = np.zeros_like(d)
    off = ~np.eye(geometry.n_atoms, dtype=bool)
    v[off] = c6 / d[off] ** 6
    return v


class RydbergOperator:
    """Matrix-free building blocks shared by static and time-dependent H.

    Caches the occupation-count diagonal ``sum_i n_i`` and the interaction
    diagonal ``sum_{i<j} V_ij n_i n_j``; the drive is applied by reshaping
    the state so atom ``k`` sits on its own axis (or through cached CSR
    matrices for small systems). ``apply`` only reads its
    inputs, so one instance can serve concurrent callers.
    """

    def __init__(self, geometry: Geometry, c6: float):
        n = geometry.n_atoms
        if n > SPARSE_CAP:
            raise ResourceLimitError(f"{n} atoms exceeds the matrix-free cap of {SPARSE_CAP}", SPARSE_CAP)
        self.n_atoms = n
        self.dim = 2**n
        vmat = interaction_matrix(geometry, c6)
        occ = [basis.occupation(n, k) for k in range(n)]
        self.n_total = np.sum(occ, axis=0) if n else np.zeros(1)
        vdiag = np.zeros(self.dim)
        for i in range(n):
            for j in range(i + 1, n):
                vdiag += vmat[i, j] * (occ[i] * occ[j])
        self.v_diag = vdiag
        self._lower = self._upper = None
        if n <= CSR_CAP:
            self._lower = self.drive_csr().astype(complex)
            self._upper = self._lower.T.tocsr()

    def diagonal(self, delta: float, interaction_weight: float = 1.0) -> np.ndarray:
        return -delta * self.n_total + interaction_weight * self.v_diag

    def apply(self, v: np.ndarray, diag: np.ndarray, g: complex) -> np.ndarray:
        """Return ``D v + sum_k (g |g_k><r_k| + conj(g) |r_k><g_k|) v``."""
        out = diag * v
        if g != 0 and self._lower is not None:
            out += g * (self._lower @ v)
            out += np.conj(g) * (self._upper @ v)
        elif g != 0:
            gc = np.conj(g)
            for k in range(self.n_atoms):
                a = v.reshape(2**k, 2, -1)
                o = out.reshape(2**k, 2, -1)
                o[:, 0, :] += g * a[:, 1, :]
                o[:, 1, :] += gc * a[:, 0, :]
        return out

    def drive_csr(self) -> sp.csr_matrix:
        """Sparse ``sum_k |g_k><r_k|`` (the conjugate direction is its transpose)."""
        n, dim = self.n_atoms, self.dim
        idx = np.arange(dim, dtype=np.int64)
        rows, cols = [], []
        for k in range(n):
            mask = 1 << (n - 1 - k)
            low = idx[(idx & mask) == 0]
            rows.append(low)
            cols.append(low | mask)
        rows = np.concatenate(rows) if rows else np.zeros(0, np.int64)
        cols = np.concatenate(cols) if cols else np.zeros(0, np.int64)
        return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(dim, dim))


class HamiltonianMatrix:
    """Static Rydberg Hamiltonian in dense or matrix-free sparse storage."""

    def __init__(self, op: RydbergOperator, params: DriveParams, storage: str):
        self.op = op
        self.params = params
        self.storage = storage
        self.n_atoms = op.n_atoms
        self.dim = op.dim
        self.diagonal = op.diagonal(params.delta)
        self.coupling = 0.5 * params.omega * np.exp(1j * params.phi)
        self._dense = self._assemble().toarray() if storage == "dense" else None

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim, self.dim)

    @property
    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral norm."""
        return float(np.abs(self.diagonal).max() + self.n_atoms * abs(self.coupling))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self._dense is not None:
            return self._dense @ v
        return self.op.apply(v, self.diagonal, self.coupling)

    __matmul__ = matvec

    def _assemble(self) -> sp.csr_matrix:
        lower = self.op.drive_csr()
        g = self.coupling
        h = g * lower + np.conj(g) * lower.T + sp.diags(self.diagonal.astype(complex))
        return sp.csr_matrix(h)

    def tocsr(self) -> sp.csr_matrix:
        return self._assemble()

    def toarray(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        if self.n_atoms > DENSE_CAP:
            raise ResourceLimitError(f"{self.n_atoms} atoms exceeds the dense cap of {DENSE_CAP}", DENSE_CAP)
        return self._assemble().toarray()


def build(geometry: Geometry, params: DriveParams | None = None, storage: str = "sparse") -> HamiltonianMatrix:
    """Build the Hamiltonian for ``geometry``.

    ``storage="dense"`` materializes the full matrix (N <= 14);
    ``storage="sparse"`` keeps only the cached diagonals and applies the
    drive matrix-free (N <= 24).
    """
    params = params or DriveParams()
    if storage not in ("dense", "sparse"):
        raise InvalidArgumentError(f"unknown storage {storage!r}")
    cap = DENSE_CAP if storage == "dense" else SPARSE_CAP
    if geometry.n_atoms > cap:
        raise ResourceLimitError(f"{geometry.n_atoms} atoms exceeds the {storage} cap of {cap}", cap)
    return HamiltonianMatrix(RydbergOperator(geometry, params.c6), params, storage)
