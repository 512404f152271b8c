"""Shot sampling, count dictionaries, empirical probabilities and truncation."""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import basis
from .entropy import ProbabilityTable, distribution_entropies
from .errors import CountsParseError, DegenerateDataError, InvalidArgumentError
from .lattice import Partition

__all__ = [
    "Counts",
    "RunEnsemble",
    "EnsembleStats",
    "DEFAULT_MIN_COUNT",
    "sample",
    "empirical",
    "truncate",
    "truncate_exact",
    "parse_counts",
    "ensemble_stats",
]

# states seen 10 times or fewer are dropped
DEFAULT_MIN_COUNT = 11


@dataclass(frozen=True)
class Counts:
    """Measurement counts keyed by g/r bitstrings.

    Keys given in the 0/1 alphabet are converted on construction. Zero
    counts are dropped.
    """

    counts: Mapping[str, int]

    def __post_init__(self):
        clean: dict[str, int] = {}
        length = None
        for key, value in self.counts.items():
            if not isinstance(key, str) or not key or set(key) - set("gr01"):
                raise InvalidArgumentError(f"invalid bitstring key {key!r}")
            if length is None:
                length = len(key)
            elif len(key) != length:
                raise InvalidArgumentError(f"key {key!r} has length {len(key)}, expected {length}")
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise InvalidArgumentError(f"count for {key!r} must be a non-negative integer, got {value!r}")
            gr = basis.to_gr(key)
            if gr in clean:
                raise InvalidArgumentError(f"bitstring {gr!r} appears twice")
            if int(value):
                clean[gr] = int(value)
        if length is None:
            raise InvalidArgumentError("counts are empty")
        object.__setattr__(self, "counts", dict(sorted(clean.items())))
        object.__setattr__(self, "_n", length)

    @property
    def n_atoms(self) -> int:
        return self._n

    @property
    def shots(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self) -> Iterator[str]:
        return iter(self.counts)

    def __getitem__(self, key: str) -> int:
        return self.counts.get(basis.to_gr(key), 0)

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "shots": self.shots}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class RunEnsemble:
    runs: tuple[Counts, ...]

    def __post_init__(self):
        runs = tuple(self.runs)
        if len({r.n_atoms for r in runs}) > 1:
            raise InvalidArgumentError("runs in an ensemble must share the atom count")
        object.__setattr__(self, "runs", runs)

    def __len__(self) -> int:
        return len(self.runs)

    def __iter__(self):
        return iter(self.runs)


def sample(p: ProbabilityTable, shots: int, seed=0) -> Counts:
    """Multinomial draw of ``shots`` bitstrings from ``p``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts; the PCG64
    stream makes results reproducible across platforms.
    """
    if shots < 1:
        raise InvalidArgumentError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    probs = p.probs / p.probs.sum()
    drawn = rng.multinomial(shots, probs)
    return Counts(
        {basis.index_to_bitstring(int(i), p.n_atoms): int(c) for i, c in zip(p.indices, drawn) if c}
    )


def empirical(counts: Counts) -> ProbabilityTable:
    """Relative frequencies ``count / shots``."""
    shots = counts.shots
    if shots < 1:
        raise InvalidArgumentError("cannot normalize zero shots")
    keys = list(counts.counts)
    return ProbabilityTable(
        counts.n_atoms,
        [basis.bitstring_to_index(k) for k in keys],
        [counts.counts[k] / shots for k in keys],
    )


def truncate(counts: Counts, min_count: int = DEFAULT_MIN_COUNT) -> Counts:
    """Drop bitstrings observed fewer than ``min_count`` times.

    The shot total shrinks to what remains, so probabilities estimated
    afterwards are renormalized over the kept states.
    """
    if min_count < 0:
        raise InvalidArgumentError("min_count must be >= 0")
    kept = {k: v for k, v in counts.counts.items() if v >= min_count}
    if not kept:
        raise DegenerateDataError(f"no bitstring has at least {min_count} counts")
    return Counts(kept)


def truncate_exact(p: ProbabilityTable, shots: int, min_count: int = DEFAULT_MIN_COUNT) -> ProbabilityTable:
    """Exact-probability analogue of :func:`truncate`.

    Keeps states whose expected count ``p * shots`` (unrounded) reaches
    ``min_count`` and renormalizes.
    """
    if min_count < 0:
        raise InvalidArgumentError("min_count must be >= 0")
    keep = p.probs * shots >= min_count
    if not keep.any():
        raise DegenerateDataError(f"no state has an expected count of at least {min_count}")
    kept = p.probs[keep]
    return ProbabilityTable(p.n_atoms, p.indices[keep], kept / kept.sum())


def _line_col(text: str, pos: int) -> str:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f"line {line}, column {col}"


def _locate_key(text: str, key: str) -> str:
    for quote in ('"', "'"):
        pos = text.find(f"{quote}{key}{quote}")
        if pos >= 0:
            return f"key {key!r} at {_line_col(text, pos)}"
    return f"key {key!r}"


def parse_counts(text: str) -> Counts:
    """Parse a counts dictionary.

    Accepts the canonical ``{"counts": {...}, "shots": n}`` form, a bare
    ``{"bitstring": n, ...}`` JSON object, or a Python dict literal (single
    quotes) pasted from device logs.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as json_exc:
        try:
            data = ast.literal_eval(text.strip())
        except (ValueError, SyntaxError) as exc:
            lineno = getattr(exc, "lineno", None)
            where = f"line {lineno}, column {exc.offset}" if lineno else _line_col(text, json_exc.pos)
            raise CountsParseError(f"not a JSON object or Python dict: {json_exc.msg}", where) from None
    if not isinstance(data, dict):
        raise CountsParseError(f"expected a dictionary, got {type(data).__name__}", "top level")

    shots = None
    if "counts" in data and isinstance(data["counts"], dict):
        shots = data.get("shots")
        data = data["counts"]
    if not data:
        raise CountsParseError("no bitstrings found", "top level")

    length = None
    for key, value in data.items():
        if not isinstance(key, str) or not key:
            raise CountsParseError("bitstring keys must be non-empty strings", f"key {key!r}")
        bad = set(key) - set("gr01")
        if bad:
            raise CountsParseError(f"invalid symbols {sorted(bad)} in bitstring", _locate_key(text, key))
        if length is None:
            length = len(key)
        elif len(key) != length:
            raise CountsParseError(f"bitstring length {len(key)} differs from {length}", _locate_key(text, key))
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise CountsParseError(f"count must be a non-negative integer, got {value!r}", _locate_key(text, key))
    try:
        counts = Counts(data)
    except InvalidArgumentError as exc:
        raise CountsParseError(str(exc), "top level") from None
    if shots is not None and shots != counts.shots:
        raise CountsParseError(f"'shots' is {shots} but counts sum to {counts.shots}", "key 'shots'")
    return counts


@dataclass(frozen=True)
class EnsembleStats:
    """Per-quantity sample mean and standard error of the mean over runs."""

    n_runs: int
    mean: dict[str, float]
    sem: dict[str, float]
    per_run: tuple[dict[str, float], ...]

    def to_dict(self) -> dict:
        return {"n_runs": self.n_runs, "mean": self.mean, "sem": self.sem}


def ensemble_stats(runs: RunEnsemble | Sequence[Counts], partition: Partition) -> EnsembleStats:
    """Entropies of every run, then their mean and standard error."""
    runs = runs if isinstance(runs, RunEnsemble) else RunEnsemble(tuple(runs))
    if len(runs) < 2:
        raise InvalidArgumentError("ensemble statistics need at least 2 runs")
    per_run = tuple(distribution_entropies(empirical(c), partition) for c in runs)
    keys = list(per_run[0])
    table = np.array([[r[k] for k in keys] for r in per_run])
    # centring on the first run keeps identical runs at exactly zero spread
    centred = table - table[0]
    mean = table[0] + centred.mean(axis=0)
    sem = centred.std(axis=0, ddof=1) / np.sqrt(len(per_run))
    return EnsembleStats(
        len(per_run),
        {k: float(m) for k, m in zip(keys, mean)},
        {k: float(s) for k, s in zip(keys, sem)},
        per_run,
    )
