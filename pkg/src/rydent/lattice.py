"""Atom geometries, bipartitions and analog-device constraint checks.

Positions are in micrometres. Atom ordering is fixed by the builders:

* ``chain``: left to right, atom ``i`` at ``(i * a_x, 0)``.
* ``ladder``: leg-major, leg 0 holds indices ``0..n_rungs-1`` and leg 1 holds
  ``n_rungs..2*n_rungs-1``; atom ``(rung, leg)`` sits at ``(rung * a_x, leg * a_y)``.

Every bitstring in the package depends on these conventions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Geometry",
    "Partition",
    "DeviceLimits",
    "Violation",
    "AQUILA_LIMITS",
    "chain",
    "ladder",
    "half_partition",
    "validate_device",
]


@dataclass(frozen=True)
class Geometry:
    """Immutable set of 2D atom positions (μm)."""

    positions: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pos = tuple((float(x), float(y)) for x, y in self.positions)
        object.__setattr__(self, "positions", pos)
        if len(pos) < 1:
            raise InvalidArgumentError("a geometry needs at least one atom")
        d = self.distances()
        if len(pos) > 1:
            off = d[~np.eye(len(pos), dtype=bool)]
            if not np.all(off > 0) or not np.all(np.isfinite(off)):
                i, j = np.argwhere((d <= 0) & ~np.eye(len(pos), dtype=bool))[0]
                raise InvalidArgumentError(f"atoms {i} and {j} coincide")

    @property
    def n_atoms(self) -> int:
        return len(self.positions)

    @property
    def array(self) -> np.ndarray:
        """Positions as a fresh ``(N, 2)`` float array."""
        return np.array(self.positions, dtype=float).reshape(-1, 2)

    def distances(self) -> np.ndarray:
        """Pairwise distance matrix ``r_ij`` (zero diagonal)."""
        p = np.array(self.positions, dtype=float).reshape(-1, 2)
        return np.sqrt(((p[:, None, :] - p[None, :, :]) ** 2).sum(-1))

    def extent(self) -> float:
        """Largest pairwise distance (0 for a single atom)."""
        return float(self.distances().max())

    def scaled(self, factor: float) -> "Geometry":
        return Geometry(tuple((factor * x, factor * y) for x, y in self.positions))

    def to_dict(self) -> dict:
        return {"positions": [list(p) for p in self.positions]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Geometry":
        try:
            positions = data["positions"]
            return cls(tuple((float(x), float(y)) for x, y in positions))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed geometry: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Geometry":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Partition:
    """Bipartition of atom indices into subsystem A and its complement B.

    ``a_indices`` keeps the caller's order (it fixes the bit order of the
    reduced basis); ``b_indices`` is always ascending.
    """

    a_indices: tuple[int, ...]
    b_indices: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(i) for i in self.a_indices)
        b = tuple(sorted(int(i) for i in self.b_indices))
        object.__setattr__(self, "a_indices", a)
        object.__setattr__(self, "b_indices", b)
        everything = a + b
        n = len(everything)
        if len(set(everything)) != n:
            raise InvalidArgumentError("partition halves overlap or repeat indices")
        if sorted(everything) != list(range(n)):
            raise InvalidArgumentError(f"partition must cover atoms 0..{n - 1} exactly")

    @classmethod
    def of(cls, a_indices: Iterable[int], n_atoms: int) -> "Partition":
        a = tuple(int(i) for i in a_indices)
        bad = [i for i in a if not 0 <= i < n_atoms]
        if bad:
            raise InvalidArgumentError(f"indices {bad} out of range for {n_atoms} atoms")
        b = tuple(i for i in range(n_atoms) if i not in set(a))
        return cls(a, b)

    @property
    def n_atoms(self) -> int:
        return len(self.a_indices) + len(self.b_indices)

    def swapped(self) -> "Partition":
        return Partition(self.b_indices, self.a_indices)

    def to_dict(self) -> dict:
        return {"a": list(self.a_indices)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, n_atoms: int) -> "Partition":
        try:
            return cls.of(data["a"], n_atoms)
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed partition: {exc}") from exc

    @classmethod
    def from_json(cls, text: str, n_atoms: int) -> "Partition":
        return cls.from_dict(json.loads(text), n_atoms)


@dataclass(frozen=True)
class DeviceLimits:
    max_extent: float = 100.0
    min_spacing: float = 4.0

    def __post_init__(self):
        if not (self.max_extent > 0 and self.min_spacing > 0):
            raise InvalidArgumentError("device limits must be strictly positive")


AQUILA_LIMITS = DeviceLimits(100.0, 4.0)


@dataclass(frozen=True)
class Violation:
    kind: str  # "extent" or "spacing"
    pair: tuple[int, int]
    value: float
    limit: float

    def __str__(self) -> str:
        i, j = self.pair
        if self.kind == "extent":
            return f"extent: atoms {i}-{j} are {self.value:.4g} um apart > {self.limit:.4g} um"
        return f"spacing: atoms {i}-{j} are {self.value:.4g} um apart < {self.limit:.4g} um"


def chain(n_atoms: int, a_x: float) -> Geometry:
    """Equally spaced chain along x: atom ``i`` at ``(i * a_x, 0)``."""
    if n_atoms < 1:
        raise InvalidArgumentError("n_atoms must be >= 1")
    if not a_x > 0:
        raise InvalidArgumentError("a_x must be > 0")
    return Geometry(tuple((i * a_x, 0.0) for i in range(n_atoms)))


def ladder(n_rungs: int, a_x: float, a_y: float) -> Geometry:
    """Two-leg ladder with leg-major atom ordering."""
    if n_rungs < 1:
        raise InvalidArgumentError("n_rungs must be >= 1")
    if not (a_x > 0 and a_y > 0):
        raise InvalidArgumentError("a_x and a_y must be > 0")
    return Geometry(tuple((i * a_x, leg * a_y) for leg in range(2) for i in range(n_rungs)))


def half_partition(
    geometry: Geometry, mode: str = "chain-halves", indices: Sequence[int] | None = None
) -> Partition:
    """Build a bipartition of ``geometry``.

    Parameters
    ----------
    mode : {"chain-halves", "ladder-legs", "ladder-rungs", "explicit"}
        ``chain-halves`` puts atoms ``0..N/2-1`` in A. ``ladder-legs`` puts
        leg 0 in A (with leg-major ordering this is the same index set).
        ``ladder-rungs`` takes the first N/2 atoms in rung-major order, i.e.
        the left rungs plus one atom of the middle rung when the rung count
        is odd. ``explicit`` uses ``indices`` as given.
    """
    n = geometry.n_atoms
    if mode == "explicit":
        if indices is None:
            raise InvalidArgumentError("explicit partition needs indices")
        return Partition.of(indices, n)
    if n % 2:
        raise InvalidArgumentError(f"mode {mode!r} needs an even atom count, got {n}")
    half = n // 2
    if mode in ("chain-halves", "ladder-legs"):
        return Partition.of(range(half), n)
    if mode == "ladder-rungs":
        rung_major = [leg * half + r for r in range(half) for leg in range(2)]
        return Partition.of(rung_major[:half], n)
    raise InvalidArgumentError(f"unknown partition mode {mode!r}")


def validate_device(geometry: Geometry, limits: DeviceLimits = AQUILA_LIMITS) -> list[Violation]:
    """List device-constraint violations; an empty list means the geometry fits.

    The extent check uses the largest pairwise distance, the spacing check
    reports every pair closer than ``limits.min_spacing``.
    """
    n = geometry.n_atoms
    if n == 1:
        return []
    d = geometry.distances()
    iu, ju = np.triu_indices(n, k=1)
    pair_d = d[iu, ju]
    out = []
    k = int(np.argmax(pair_d))
    if pair_d[k] > limits.max_extent:
        out.append(Violation("extent", (int(iu[k]), int(ju[k])), float(pair_d[k]), limits.max_extent))
    for k in np.flatnonzero(pair_d < limits.min_spacing):
        out.append(Violation("spacing", (int(iu[k]), int(ju[k])), float(pair_d[k]), limits.min_spacing))
    return out
