"""Occupation-basis conventions.

Character ``k`` of a bitstring names atom ``k``; ``'g'``/``'0'`` is the ground
state and ``'r'``/``'1'`` the Rydberg state. The integer index of a basis
state is ``sum_k n_k * 2**(N-1-k)``, so atom 0 is the most significant bit
and ``np.reshape(c, [2] * N)`` puts atom ``k`` on axis ``k``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError

_TO_BIT = {"g": 0, "r": 1, "0": 0, "1": 1}


def bitstring_to_index(s: str) -> int:
    idx = 0
    for ch in s:
        try:
            idx = (idx << 1) | _TO_BIT[ch]
        except KeyError:
            raise InvalidArgumentError(f"invalid symbol {ch!r} in bitstring {s!r}") from None
    return idx


def index_to_bitstring(index: int, n_atoms: int, alphabet: str = "gr") -> str:
    if not 0 <= index < 2**n_atoms:
        raise InvalidArgumentError(f"index {index} out of range for {n_atoms} atoms")
    return "".join(alphabet[(index >> (n_atoms - 1 - k)) & 1] for k in range(n_atoms))


def to_gr(s: str) -> str:
    """Canonical g/r spelling of a bitstring written in either alphabet."""
    return s.translate(str.maketrans("01", "gr"))


def occupations(n_atoms: int) -> np.ndarray:
    """``(2**N, N)`` uint8 table of ``n_k`` for every basis index."""
    idx = np.arange(2**n_atoms, dtype=np.int64)
    shifts = n_atoms - 1 - np.arange(n_atoms)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def occupation(n_atoms: int, atom: int) -> np.ndarray:
    """``n_atom`` for every basis index, as a float array."""
    idx = np.arange(2**n_atoms, dtype=np.int64)
    return ((idx >> (n_atoms - 1 - atom)) & 1).astype(float)


def sub_index(indices: np.ndarray, n_atoms: int, atoms: Sequence[int]) -> np.ndarray:
    """Map full basis indices to indices of the restricted basis on ``atoms``.

    The first entry of ``atoms`` becomes the most significant bit.
    """
    indices = np.asarray(indices, dtype=np.int64)
    out = np.zeros_like(indices)
    for atom in atoms:
        out = (out << 1) | ((indices >> (n_atoms - 1 - atom)) & 1)
    return out
