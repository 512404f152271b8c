"""End-to-end workflows behind the command-line interface.

Parameter sweeps over ``R_b / a_x``, adiabatic preparation followed by shot
sampling, and analysis of measured count files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import counts as cnt
from . import entropy as ent
from .dynamics import EvolutionConfig, Schedule, all_ground, evolve, standard_schedule
from .errors import InvalidArgumentError, RydentError
from .hamiltonian import DriveParams, build
from .lattice import AQUILA_LIMITS, DeviceLimits, Geometry, Partition, chain, half_partition, ladder, validate_device
from .spectra import ground_state

__all__ = [
    "SweepRow",
    "CSV_FIELDS",
    "sweep_chain",
    "sweep_ladder",
    "sweep",
    "prepare_and_sample",
    "PreparationResult",
    "analyze",
    "AnalysisResult",
    "rows_to_csv",
    "rows_from_csv",
    "default_jobs",
]

DEFAULT_CONSTANT = 1.25

CSV_FIELDS = (
    "rb_over_ax",
    "s_ab_x",
    "s_a_x",
    "s_vn_a",
    "estimator",
    "scaled_estimator",
    "s2_ab_x",
    "s2_a_x",
    "s2_renyi_a",
    "estimator2",
)

_REPORT_FIELDS = tuple(ent.EntropyReport.__dataclass_fields__)


@dataclass(frozen=True)
class SweepRow:
    rb_over_ax: float
    s_ab_x: float = math.nan
    s_a_x: float = math.nan
    s_b_x: float = math.nan
    s_vn_a: float = math.nan
    estimator: float = math.nan
    scaled_estimator: float = math.nan
    s2_ab_x: float = math.nan
    s2_a_x: float = math.nan
    s2_renyi_a: float = math.nan
    estimator2: float = math.nan
    energy: float = math.nan
    degenerate: bool = False
    error: str | None = None
    ensemble_mean: dict | None = None
    ensemble_sem: dict | None = None

    def __post_init__(self):
        if not self.rb_over_ax > 0:
            raise InvalidArgumentError("rb_over_ax must be > 0")

    @property
    def report(self) -> ent.EntropyReport:
        return ent.EntropyReport(**{k: getattr(self, k) for k in _REPORT_FIELDS})

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("ensemble_mean", "ensemble_sem", "error"):
            if d[key] is None:
                del d[key]
        return d


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("RYDENT_JOBS", "1")))
    except ValueError:
        return 1


def _ordered_map(fn: Callable, items: Sequence, jobs: int) -> list:
    """``map`` that keeps input order, optionally over worker processes."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class _SweepPoint:
    geometry_kind: str
    size: int
    ay_over_ax: float
    partition_mode: str
    params: DriveParams
    rb_over_ax: float
    constant: float
    tol: float
    seed: int


def _geometry_for(point: _SweepPoint) -> Geometry:
    a_x = point.params.r_b / point.rb_over_ax
    if point.geometry_kind == "chain":
        return chain(point.size, a_x)
    return ladder(point.size, a_x, point.ay_over_ax * a_x)


def _solve_point(point: _SweepPoint) -> SweepRow:
    try:
        geometry = _geometry_for(point)
        partition = half_partition(geometry, point.partition_mode)
        result = ground_state(build(geometry, point.params), tol=point.tol, seed=point.seed)
        rep = ent.report(result.state, partition)
    except (RydentError, np.linalg.LinAlgError) as exc:
        return SweepRow(point.rb_over_ax, error=f"{type(exc).__name__}: {exc}")
    return SweepRow(
        point.rb_over_ax,
        scaled_estimator=point.constant * rep.estimator,
        energy=result.energy,
        degenerate=result.degenerate,
        **rep.to_dict(),
    )


def sweep(points: Sequence[_SweepPoint], jobs: int = 1) -> list[SweepRow]:
    return _ordered_map(_solve_point, list(points), jobs)


def _check_ratios(rb_over_ax: Iterable[float]) -> list[float]:
    ratios = [float(x) for x in rb_over_ax]
    if not ratios:
        raise InvalidArgumentError("rb_over_ax list is empty")
    if any(not x > 0 for x in ratios):
        raise InvalidArgumentError("rb_over_ax values must be > 0")
    return ratios


def sweep_chain(
    n_atoms: int = 10,
    delta_over_omega: float = 3.5,
    rb_over_ax: Iterable[float] = (1.5,),
    constant: float = DEFAULT_CONSTANT,
    omega: float = 5 * np.pi,
    r_b: float = 8.375,
    tol: float = 1e-10,
    seed: int = 0,
    jobs: int = 1,
) -> list[SweepRow]:
    """Ground-state entropies of an ``n_atoms`` chain for each ``R_b / a_x``.

    ``constant`` only multiplies the ``scaled_estimator`` column.
    """
    params = DriveParams.from_ratio(delta_over_omega, omega, r_b)
    pts = [
        _SweepPoint("chain", n_atoms, 0.0, "chain-halves", params, x, constant, tol, seed)
        for x in _check_ratios(rb_over_ax)
    ]
    return sweep(pts, jobs)


def sweep_ladder(
    n_rungs: int = 5,
    ay_over_ax: float = 0.5,
    delta_over_omega: float = 3.5,
    rb_over_ax: Iterable[float] = (1.5,),
    constant: float = DEFAULT_CONSTANT,
    omega: float = 5 * np.pi,
    r_b: float = 8.375,
    partition: str = "ladder-legs",
    tol: float = 1e-10,
    seed: int = 0,
    jobs: int = 1,
) -> list[SweepRow]:
    """Like :func:`sweep_chain` for a two-leg ladder with ``a_y = ay_over_ax * a_x``."""
    if not ay_over_ax > 0:
        raise InvalidArgumentError("ay_over_ax must be > 0")
    params = DriveParams.from_ratio(delta_over_omega, omega, r_b)
    pts = [
        _SweepPoint("ladder", n_rungs, ay_over_ax, partition, params, x, constant, tol, seed)
        for x in _check_ratios(rb_over_ax)
    ]
    return sweep(pts, jobs)


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([repr(float(getattr(row, f))) for f in CSV_FIELDS])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise InvalidArgumentError(f"unexpected CSV header {reader.fieldnames}")
    return [SweepRow(**{k: float(v) for k, v in rec.items()}) for rec in reader]


@dataclass(frozen=True)
class PreparationResult:
    ensemble: cnt.RunEnsemble
    stats: cnt.EnsembleStats | None
    final_report: ent.EntropyReport
    violations: tuple
    constant: float = DEFAULT_CONSTANT

    def summary(self) -> dict:
        out = {
            "n_runs": len(self.ensemble),
            "shots": [c.shots for c in self.ensemble],
            "final_state": self.final_report.to_dict(),
            "violations": [str(v) for v in self.violations],
            "constant": self.constant,
        }
        if self.stats is not None:
            out["ensemble"] = self.stats.to_dict()
            out["scaled_estimator_mean"] = self.constant * self.stats.mean["estimator"]
            out["scaled_estimator_sem"] = self.constant * self.stats.sem["estimator"]
        return out


def prepare_and_sample(
    geometry: Geometry,
    variant: str = "LSNRD",
    shots: int = 1000,
    repeats: int = 10,
    seed: int = 0,
    params: DriveParams | None = None,
    partition: Partition | None = None,
    duration: float = 4.0,
    schedule: Schedule | None = None,
    config: EvolutionConfig | None = None,
    limits: DeviceLimits = AQUILA_LIMITS,
    force: bool = False,
    constant: float = DEFAULT_CONSTANT,
) -> PreparationResult:
    """Adiabatically prepare from ``gg...g``, then take ``repeats`` runs of ``shots``.

    Each repeat draws from its own child of ``np.random.SeedSequence(seed)``.
    Device-limit violations raise unless ``force`` is set, in which case
    they are recorded in the result.
    """
    params = params or DriveParams()
    violations = tuple(validate_device(geometry, limits))
    if violations and not force:
        raise InvalidArgumentError("geometry violates device limits: " + "; ".join(map(str, violations)))
    if shots < 1 or repeats < 1:
        raise InvalidArgumentError("shots and repeats must be >= 1")
    partition = partition or half_partition(geometry, "chain-halves")
    schedule = schedule or standard_schedule(params, variant, duration)

    final = evolve(all_ground(geometry.n_atoms), geometry, schedule, config, params)
    probs = ent.probabilities(final)
    children = np.random.SeedSequence(seed).spawn(repeats)
    runs = cnt.RunEnsemble(tuple(cnt.sample(probs, shots, child) for child in children))
    stats = cnt.ensemble_stats(runs, partition) if repeats >= 2 else None
    return PreparationResult(runs, stats, ent.report(final, partition), violations, constant)


@dataclass(frozen=True)
class AnalysisResult:
    names: tuple[str, ...]
    raw: tuple[dict, ...]
    truncated: tuple[dict | None, ...]
    shots: tuple[int, ...]
    kept_shots: tuple[int, ...]
    min_count: int
    constant: float
    ensemble: dict | None = None
    ensemble_truncated: dict | None = None

    def to_dict(self) -> dict:
        files = []
        for i, name in enumerate(self.names):
            raw = dict(self.raw[i], scaled_estimator=self.constant * self.raw[i]["estimator"])
            tr = self.truncated[i]
            if tr is not None:
                tr = dict(tr, scaled_estimator=self.constant * tr["estimator"])
            files.append(
                {"name": name, "shots": self.shots[i], "kept_shots": self.kept_shots[i], "raw": raw, "truncated": tr}
            )
        out = {"min_count": self.min_count, "constant": self.constant, "files": files}
        if self.ensemble is not None:
            out["ensemble"] = self.ensemble
        if self.ensemble_truncated is not None:
            out["ensemble_truncated"] = self.ensemble_truncated
        return out

    def to_csv(self) -> str:
        keys = ("s_ab_x", "s_a_x", "s_b_x", "estimator", "s2_ab_x", "s2_a_x", "estimator2")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("name", "data", "shots") + keys + ("scaled_estimator",))
        for i, name in enumerate(self.names):
            for label, d, n in (("raw", self.raw[i], self.shots[i]), ("truncated", self.truncated[i], self.kept_shots[i])):
                if d is None:
                    continue
                w.writerow([name, label, n] + [repr(d[k]) for k in keys] + [repr(self.constant * d["estimator"])])
        return buf.getvalue()


def analyze(
    counts: Sequence[cnt.Counts],
    partition: Partition | None = None,
    min_count: int = cnt.DEFAULT_MIN_COUNT,
    constant: float = DEFAULT_CONSTANT,
    names: Sequence[str] | None = None,
) -> AnalysisResult:
    """Entropies of measured counts, raw and after low-count truncation.

    ``partition`` defaults to the first half of the atoms. When a file has
    no bitstring above the threshold its truncated entry is ``None``. With
    two or more inputs, ensemble mean/SE are reported as well.
    """
    counts = list(counts)
    if not counts:
        raise InvalidArgumentError("nothing to analyze")
    n = counts[0].n_atoms
    if any(c.n_atoms != n for c in counts):
        raise InvalidArgumentError("count files have different atom counts")
    if partition is None:
        partition = Partition.of(range(n // 2), n) if n > 1 else Partition.of([0], 1)
    names = tuple(names) if names is not None else tuple(f"run{i}" for i in range(len(counts)))

    raw, trunc, kept = [], [], []
    truncated_counts = []
    for c in counts:
        raw.append(ent.distribution_entropies(cnt.empirical(c), partition))
        try:
            t = cnt.truncate(c, min_count)
        except cnt.DegenerateDataError:
            trunc.append(None)
            kept.append(0)
            continue
        truncated_counts.append(t)
        trunc.append(ent.distribution_entropies(cnt.empirical(t), partition))
        kept.append(t.shots)

    ens = ens_t = None
    if len(counts) >= 2:
        ens = cnt.ensemble_stats(counts, partition).to_dict()
        if len(truncated_counts) >= 2:
            ens_t = cnt.ensemble_stats(truncated_counts, partition).to_dict()
    return AnalysisResult(
        names, tuple(raw), tuple(trunc), tuple(c.shots for c in counts), tuple(kept), min_count, constant, ens, ens_t
    )


def dumps(obj) -> str:
    """Deterministic JSON used for every CLI output."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"
