"""Command-line front end: ``rydent <subcommand> ...``.

Exit codes: 0 success, 2 validation failure, 3 convergence/integration
failure, 4 parse failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import counts as cnt
from . import workflows as wf
from .dynamics import EvolutionConfig, Schedule
from .entropy import probabilities
from .errors import ConvergenceError, CountsParseError, IntegrationError, InvalidArgumentError, RydentError
from .hamiltonian import DriveParams, build
from .lattice import DeviceLimits, Geometry, Partition, chain, ladder, validate_device
from .spectra import ground_state

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICS, EXIT_PARSE = 0, 2, 3, 4

_UNITS = {
    "length": {"", "um", "μm", "µm"},
    "frequency": {"", "rad/us", "rad/μs", "rad/µs"},
    "time": {"", "us", "μs", "µs"},
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*([^\d\s].*)?$")


class _ParseFailure(Exception):
    pass


def parse_quantity(text: str, kind: str) -> float:
    """Parse ``"8.375um"``, ``"5pi rad/us"``, ``"4 μs"`` or a bare number."""
    m = _QUANTITY.match(str(text))
    if not m or (m.group(1) is None and m.group(2) is None):
        raise argparse.ArgumentTypeError(f"cannot parse {kind} {text!r}")
    value = float(m.group(1)) if m.group(1) is not None else 1.0
    if m.group(2):
        value *= math.pi
    unit = (m.group(3) or "").strip()
    if unit not in _UNITS[kind]:
        allowed = ", ".join(sorted(u for u in _UNITS[kind] if u))
        raise argparse.ArgumentTypeError(f"unit {unit!r} not accepted for {kind} (use {allowed})")
    return value


def _length(text):
    return parse_quantity(text, "length")


def _frequency(text):
    return parse_quantity(text, "frequency")


def _time(text):
    return parse_quantity(text, "time")


def parse_ratio_list(text: str) -> list[float]:
    """``"0.5,1.0,1.5"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(max(n, 0))]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse ratio list {text!r}") from None


def _index_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse index list {text!r}") from None


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise _ParseFailure(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise _ParseFailure(f"{path}: {exc}") from None


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _drive_args(p: argparse.ArgumentParser):
    p.add_argument("--omega", type=_frequency, default=5 * np.pi, help="Rabi frequency (default 5pi rad/us)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--delta-over-omega", type=float, default=None, help="detuning ratio (default 3.5)")
    g.add_argument("--delta", type=_frequency, default=None, help="final detuning (default 17.5pi rad/us)")
    p.add_argument("--rb", type=_length, default=8.375, help="blockade radius (default 8.375um)")


def _params(args) -> DriveParams:
    if args.delta is not None:
        return DriveParams(omega=args.omega, delta=args.delta, r_b=args.rb)
    ratio = 3.5 if args.delta_over_omega is None else args.delta_over_omega
    return DriveParams.from_ratio(ratio, args.omega, args.rb)


def _output_args(p: argparse.ArgumentParser, formats=("csv", "json"), default="csv"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--output", "-o", default=None, help="write to file instead of stdout")


def _geometry_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--geometry", help="geometry JSON file {\"positions\": [[x, y], ...]} in um")
    g.add_argument("--chain", type=int, metavar="N", help="N-atom chain")
    g.add_argument("--ladder", type=int, metavar="RUNGS", help="two-leg ladder with RUNGS rungs")
    p.add_argument("--rb-over-ax", type=float, default=None, help="lattice spacing as R_b/a_x")
    p.add_argument("--spacing", type=_length, default=None, help="lattice spacing a_x")
    p.add_argument("--ay-over-ax", type=float, default=1.0, help="ladder leg separation over a_x")


def _geometry(args, params: DriveParams) -> Geometry:
    if args.geometry:
        return Geometry.from_dict(_read_json(args.geometry))
    if args.chain is None and args.ladder is None:
        raise InvalidArgumentError("give --geometry, --chain or --ladder")
    if args.spacing is not None:
        a_x = args.spacing
    elif args.rb_over_ax is not None:
        if not args.rb_over_ax > 0:
            raise InvalidArgumentError("--rb-over-ax must be > 0")
        a_x = params.r_b / args.rb_over_ax
    else:
        raise InvalidArgumentError("give --spacing or --rb-over-ax")
    if args.chain is not None:
        return chain(args.chain, a_x)
    return ladder(args.ladder, a_x, args.ay_over_ax * a_x)


def _partition(args, n_atoms: int) -> Partition:
    if getattr(args, "partition_file", None):
        return Partition.from_dict(_read_json(args.partition_file), n_atoms)
    if getattr(args, "a", None):
        return Partition.of(args.a, n_atoms)
    if n_atoms == 1:
        return Partition.of([0], 1)
    return Partition.of(range(n_atoms // 2), n_atoms)


def _partition_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--partition-file", help="partition JSON file {\"a\": [indices]}")
    g.add_argument("--a", type=_index_list, help="comma-separated indices of subsystem A")


def _sweep_output(rows, args) -> int:
    for row in rows:
        if row.error:
            print(f"rb_over_ax={row.rb_over_ax}: {row.error}", file=sys.stderr)
    if args.format == "csv":
        text = wf.rows_to_csv(rows)
    else:
        text = wf.dumps([r.to_dict() for r in rows])
    _emit(text, args.output)
    if args.check_invariants:
        bad = _invariant_failures(rows)
        for msg in bad:
            print(msg, file=sys.stderr)
        if bad:
            return EXIT_VALIDATION
    return EXIT_NUMERICS if any(r.error for r in rows) else EXIT_OK


def _invariant_failures(rows) -> list[str]:
    out = []
    for r in rows:
        if r.error:
            continue
        for k, v in r.report.to_dict().items():
            if not k.startswith("estimator") and v < -1e-9:
                out.append(f"rb_over_ax={r.rb_over_ax}: {k}={v} is negative")
        if r.s_ab_x > r.s_a_x + r.s_b_x + 1e-9:
            out.append(f"rb_over_ax={r.rb_over_ax}: subadditivity violated")
        if abs(r.s_a_x - r.s_b_x) > 1e-6:
            out.append(f"rb_over_ax={r.rb_over_ax}: |S_A^X - S_B^X| = {abs(r.s_a_x - r.s_b_x):.3g}")
    return out


def cmd_sweep_chain(args) -> int:
    params = _params(args)
    rows = wf.sweep_chain(
        args.n_atoms, params.delta / params.omega, args.rb_over_ax, args.constant,
        params.omega, params.r_b, tol=args.tol, jobs=args.jobs,
    )
    return _sweep_output(rows, args)


def cmd_sweep_ladder(args) -> int:
    params = _params(args)
    rows = wf.sweep_ladder(
        args.n_rungs, args.ay_over_ax, params.delta / params.omega, args.rb_over_ax, args.constant,
        params.omega, params.r_b, partition=args.partition, tol=args.tol, jobs=args.jobs,
    )
    return _sweep_output(rows, args)


def cmd_prepare(args) -> int:
    params = _params(args)
    geometry = _geometry(args, params)
    partition = _partition(args, geometry.n_atoms)
    schedule = Schedule.from_dict(_read_json(args.schedule)) if args.schedule else None
    limits = DeviceLimits(args.max_extent, args.min_spacing)
    violations = validate_device(geometry, limits)
    if violations and not args.force:
        for v in violations:
            print(v, file=sys.stderr)
        return EXIT_VALIDATION
    result = wf.prepare_and_sample(
        geometry, args.variant, args.shots, args.repeats, args.seed, params, partition,
        args.duration, schedule, EvolutionConfig(dt=args.dt), limits, force=True, constant=args.constant,
    )
    if args.counts_dir:
        out = Path(args.counts_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, run in enumerate(result.ensemble):
            (out / f"run{i:03d}.json").write_text(run.to_json(indent=2, sort_keys=True) + "\n")
    summary = result.summary()
    summary["runs"] = [run.to_dict() for run in result.ensemble] if not args.counts_dir else None
    if summary["runs"] is None:
        del summary["runs"]
    _emit(wf.dumps(summary), args.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    params = _params(args)
    geometry = _geometry(args, params)
    state = ground_state(build(geometry, params), seed=args.seed).state
    probs = probabilities(state)
    children = np.random.SeedSequence(args.seed).spawn(args.repeats)
    runs = [cnt.sample(probs, args.shots, child) for child in children]
    if args.repeats == 1:
        text = runs[0].to_json(indent=2, sort_keys=True) + "\n"
    else:
        text = wf.dumps([r.to_dict() for r in runs])
    _emit(text, args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    loaded = []
    for path in args.files:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise _ParseFailure(f"{path}: {exc}") from None
        try:
            loaded.append(cnt.parse_counts(text))
        except CountsParseError as exc:
            raise _ParseFailure(f"{path}: {exc}") from None
    partition = _partition(args, loaded[0].n_atoms)
    result = wf.analyze(loaded, partition, args.min_count, args.constant, names=args.files)
    _emit(result.to_csv() if args.format == "csv" else wf.dumps(result.to_dict()), args.output)
    return EXIT_OK


def cmd_validate_geometry(args) -> int:
    params = _params(args)
    geometry = _geometry(args, params)
    violations = validate_device(geometry, DeviceLimits(args.max_extent, args.min_spacing))
    report = {
        "n_atoms": geometry.n_atoms,
        "extent": geometry.extent(),
        "valid": not violations,
        "violations": [str(v) for v in violations],
    }
    _emit(wf.dumps(report), args.output)
    return EXIT_VALIDATION if violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydent", description="Single-copy entanglement estimates for Rydberg arrays")
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_common(p):
        _drive_args(p)
        p.add_argument("--rb-over-ax", type=parse_ratio_list, default=parse_ratio_list("0.5:3.0:0.1"),
                       help="comma list or start:stop:step (default 0.5:3.0:0.1)")
        p.add_argument("--constant", type=float, default=wf.DEFAULT_CONSTANT, help="display factor for scaled_estimator")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--jobs", type=int, default=wf.default_jobs())
        p.add_argument("--check-invariants", action="store_true", help="verify entropy invariants row-wise")
        _output_args(p)

    p = sub.add_parser("sweep-chain", help="ground-state entropies of a chain vs R_b/a_x")
    p.add_argument("--n-atoms", type=int, default=10)
    sweep_common(p)
    p.set_defaults(func=cmd_sweep_chain)

    p = sub.add_parser("sweep-ladder", help="ground-state entropies of a two-leg ladder vs R_b/a_x")
    p.add_argument("--n-rungs", type=int, default=5)
    p.add_argument("--ay-over-ax", type=float, default=0.5)
    p.add_argument("--partition", choices=("ladder-legs", "ladder-rungs"), default="ladder-legs")
    sweep_common(p)
    p.set_defaults(func=cmd_sweep_ladder)

    p = sub.add_parser("prepare", help="adiabatic preparation followed by shot sampling")
    _drive_args(p)
    _geometry_args(p)
    _partition_args(p)
    p.add_argument("--variant", choices=("LSNRD", "LSST"), default="LSNRD")
    p.add_argument("--schedule", help="custom schedule JSON file")
    p.add_argument("--duration", type=_time, default=4.0)
    p.add_argument("--dt", type=_time, default=1e-3)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--constant", type=float, default=wf.DEFAULT_CONSTANT)
    p.add_argument("--max-extent", type=_length, default=100.0)
    p.add_argument("--min-spacing", type=_length, default=4.0)
    p.add_argument("--force", action="store_true", help="run despite device-limit violations")
    p.add_argument("--counts-dir", help="write one counts JSON per run into this directory")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("sample", help="sample shots from the exact ground state")
    _drive_args(p)
    _geometry_args(p)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("analyze", help="entropies of measured count files")
    p.add_argument("files", nargs="+")
    _partition_args(p)
    p.add_argument("--min-count", type=int, default=cnt.DEFAULT_MIN_COUNT,
                   help="truncation threshold; states with fewer counts are dropped (default 11)")
    p.add_argument("--constant", type=float, default=wf.DEFAULT_CONSTANT)
    _output_args(p, default="json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate-geometry", help="check a geometry against device limits")
    _drive_args(p)
    _geometry_args(p)
    p.add_argument("--max-extent", type=_length, default=100.0)
    p.add_argument("--min-spacing", type=_length, default=4.0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_validate_geometry)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CountsParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConvergenceError, IntegrationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except (InvalidArgumentError, RydentError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
