"""Bitstring (Shannon/Rényi-2) entropies, reduced density matrices and the
single-copy entanglement estimators.

All logarithms are natural. For a pure state on AB with computational
probabilities ``p``:

* ``s_ab_x = -sum p ln p`` and ``s_a_x`` the same for the marginal on A,
* ``s_vn_a = -Tr rho_A ln rho_A`` with ``rho_A = C C^dagger``,
* ``estimator = 2 s_a_x - s_ab_x`` (and the Rényi-2 analogue ``estimator2``).

The estimators are reported unscaled; any proportionality constant is
applied by the caller.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import basis
from .errors import InvalidArgumentError
from .lattice import Partition
from .spectra import StateVector

__all__ = [
    "ProbabilityTable",
    "DensityMatrix",
    "EntropyReport",
    "probabilities",
    "shannon",
    "reduce",
    "reduced_density_matrix",
    "von_neumann",
    "renyi2_distribution",
    "renyi2_state",
    "report",
    "distribution_entropies",
]

PROB_TOL = 1e-9


class ProbabilityTable:
    """Sparse probability distribution over basis indices of ``n_atoms`` atoms.

    Entries are stored sorted by index; zero-probability entries are kept
    only if given explicitly.
    """

    __slots__ = ("n_atoms", "indices", "probs")

    def __init__(self, n_atoms: int, indices, probs, tol: float = PROB_TOL):
        idx = np.asarray(indices, dtype=np.int64).ravel()
        pr = np.asarray(probs, dtype=float).ravel()
        if idx.shape != pr.shape:
            raise InvalidArgumentError("indices and probabilities differ in length")
        if idx.size and (idx.min() < 0 or idx.max() >= 2**n_atoms):
            raise InvalidArgumentError(f"basis index out of range for {n_atoms} atoms")
        if np.any(pr < 0):
            raise InvalidArgumentError("probabilities must be non-negative")
        if abs(pr.sum() - 1.0) > tol:
            raise InvalidArgumentError(f"probabilities sum to {pr.sum():.12g}, not 1")
        order = np.argsort(idx, kind="stable")
        idx, pr = idx[order], pr[order]
        if idx.size > 1 and np.any(np.diff(idx) == 0):
            raise InvalidArgumentError("duplicate basis index")
        idx.setflags(write=False)
        pr.setflags(write=False)
        self.n_atoms = n_atoms
        self.indices = idx
        self.probs = pr

    @classmethod
    def from_dense(cls, p: np.ndarray, n_atoms: int | None = None) -> "ProbabilityTable":
        p = np.asarray(p, dtype=float).ravel()
        n = n_atoms if n_atoms is not None else int(p.size).bit_length() - 1
        nz = np.flatnonzero(p)
        return cls(n, nz, p[nz])

    @classmethod
    def from_dict(cls, mapping: dict[str, float]) -> "ProbabilityTable":
        keys = list(mapping)
        if not keys:
            raise InvalidArgumentError("empty probability mapping")
        n = len(keys[0])
        return cls(n, [basis.bitstring_to_index(k) for k in keys], [mapping[k] for k in keys])

    def to_dense(self) -> np.ndarray:
        out = np.zeros(2**self.n_atoms)
        out[self.indices] = self.probs
        return out

    def to_dict(self, alphabet: str = "gr") -> dict[str, float]:
        return {
            basis.index_to_bitstring(int(i), self.n_atoms, alphabet): float(p)
            for i, p in zip(self.indices, self.probs)
        }

    def get(self, bitstring: str) -> float:
        k = np.searchsorted(self.indices, basis.bitstring_to_index(bitstring))
        if k < self.indices.size and self.indices[k] == basis.bitstring_to_index(bitstring):
            return float(self.probs[k])
        return 0.0

    def most_probable(self, k: int = 1) -> list[tuple[str, float]]:
        order = np.argsort(-self.probs, kind="stable")[:k]
        return [(basis.index_to_bitstring(int(self.indices[i]), self.n_atoms), float(self.probs[i])) for i in order]

    def __len__(self) -> int:
        return int(self.indices.size)

    def __repr__(self) -> str:
        return f"ProbabilityTable(n_atoms={self.n_atoms}, entries={len(self)})"


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on 2**n_atoms states."""

    __slots__ = ("matrix", "n_atoms")

    def __init__(self, matrix: np.ndarray, n_atoms: int):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2**n_atoms, 2**n_atoms):
            raise InvalidArgumentError(f"density matrix shape {m.shape} does not match {n_atoms} atoms")
        if not np.allclose(m, m.conj().T, atol=1e-10, rtol=0):
            raise InvalidArgumentError("density matrix is not Hermitian")
        m.setflags(write=False)
        self.matrix = m
        self.n_atoms = n_atoms

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues clamped to [0, 1]; values below -1e-8 are rejected."""
        tr = self.trace
        if abs(tr - 1.0) > 1e-6:
            raise InvalidArgumentError(f"density matrix trace is {tr:.9g}, not 1")
        lam = np.linalg.eigvalsh(self.matrix)
        if lam.min() < -1e-8:
            raise InvalidArgumentError(f"density matrix has eigenvalue {lam.min():.3g} < 0")
        return np.clip(lam, 0.0, 1.0)


def _xlogx_sum(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def probabilities(state: StateVector) -> ProbabilityTable:
    """Born probabilities ``|c_n|**2`` of every basis state (zeros dropped)."""
    p = np.abs(state.amplitudes) ** 2
    p = p / p.sum()
    return ProbabilityTable.from_dense(p, state.n_atoms)


def shannon(p: ProbabilityTable) -> float:
    return _xlogx_sum(p.probs)


def renyi2_distribution(p: ProbabilityTable) -> float:
    return float(-np.log(np.sum(p.probs**2)))


def _check_partition(n_atoms: int, partition: Partition):
    if partition.n_atoms != n_atoms:
        raise InvalidArgumentError(f"partition covers {partition.n_atoms} atoms but the data has {n_atoms}")


def reduce(p: ProbabilityTable, partition: Partition) -> ProbabilityTable:
    """Marginal of ``p`` on subsystem A (sum over the B bits)."""
    _check_partition(p.n_atoms, partition)
    sub = basis.sub_index(p.indices, p.n_atoms, partition.a_indices)
    keys, inverse = np.unique(sub, return_inverse=True)
    marg = np.bincount(inverse, weights=p.probs, minlength=keys.size)
    return ProbabilityTable(len(partition.a_indices), keys, marg / marg.sum() if marg.sum() else marg)


def _coefficient_matrix(state: StateVector, partition: Partition) -> np.ndarray:
    n = state.n_atoms
    na = len(partition.a_indices)
    c = state.amplitudes.reshape([2] * n)
    perm = list(partition.a_indices) + list(partition.b_indices)
    return np.transpose(c, perm).reshape(2**na, 2 ** (n - na))


def reduced_density_matrix(state: StateVector, partition: Partition) -> DensityMatrix:
    """``rho_A = C C^dagger`` with ``C[n_A, n_B] = c[n_A n_B]``."""
    _check_partition(state.n_atoms, partition)
    cm = _coefficient_matrix(state, partition)
    rho = cm @ cm.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, len(partition.a_indices))


def von_neumann(rho: DensityMatrix) -> float:
    return _xlogx_sum(rho.eigenvalues())


def renyi2_state(rho: DensityMatrix) -> float:
    purity = float(np.sum(np.abs(rho.matrix) ** 2))
    return float(-np.log(purity))


@dataclass(frozen=True)
class EntropyReport:
    s_ab_x: float
    s_a_x: float
    s_b_x: float
    s_vn_a: float
    estimator: float
    s2_ab_x: float
    s2_a_x: float
    s2_renyi_a: float
    estimator2: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "EntropyReport":
        return cls(**{k: float(data[k]) for k in cls.__dataclass_fields__})

    def scaled(self, constant: float) -> float:
        """``constant * estimator``, the quantity compared with ``s_vn_a``."""
        return constant * self.estimator


def distribution_entropies(p: ProbabilityTable, partition: Partition) -> dict[str, float]:
    """The distribution-only fields of :class:`EntropyReport`.

    These are all that measured counts give access to.
    """
    pa = reduce(p, partition)
    pb = reduce(p, partition.swapped())
    s_ab, s_a = shannon(p), shannon(pa)
    r_ab, r_a = renyi2_distribution(p), renyi2_distribution(pa)
    return {
        "s_ab_x": s_ab,
        "s_a_x": s_a,
        "s_b_x": shannon(pb),
        "estimator": 2 * s_a - s_ab,
        "s2_ab_x": r_ab,
        "s2_a_x": r_a,
        "estimator2": 2 * r_a - r_ab,
    }


def report(state: StateVector, partition: Partition) -> EntropyReport:
    """Every entropy quantity for one pure state and one cut."""
    d = distribution_entropies(probabilities(state), partition)
    rho = reduced_density_matrix(state, partition)
    return EntropyReport(
        s_ab_x=d["s_ab_x"],
        s_a_x=d["s_a_x"],
        s_b_x=d["s_b_x"],
        s_vn_a=von_neumann(rho),
        estimator=d["estimator"],
        s2_ab_x=d["s2_ab_x"],
        s2_a_x=d["s2_a_x"],
        s2_renyi_a=renyi2_state(rho),
        estimator2=d["estimator2"],
    )
