"""Piecewise-linear drive schedules and time-dependent Schrödinger evolution.

The propagator is the fourth-order commutator-free Magnus scheme

    U(t+dt, t) = exp(-i dt (a1 H(t1) + a2 H(t2))) exp(-i dt (a2 H(t1) + a1 H(t2)))

with Gauss nodes ``t1, t2`` and each exponential applied by a Lanczos
(Krylov) expansion. Every factor is unitary up to the Krylov tolerance, so
the norm is conserved even when ``||H|| dt`` is large (strong blockade).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IntegrationError, InvalidArgumentError
from .hamiltonian import DriveParams, RydbergOperator
from .lattice import Geometry
from .spectra import StateVector, tridiagonal_eigh

__all__ = [
    "Waveform",
    "Schedule",
    "EvolutionConfig",
    "standard_schedule",
    "evolve",
    "expm_krylov",
    "all_ground",
]

_A1 = (3 - 2 * math.sqrt(3)) / 12
_A2 = (3 + 2 * math.sqrt(3)) / 12
_C1 = 0.5 - math.sqrt(3) / 6
_C2 = 0.5 + math.sqrt(3) / 6


@dataclass(frozen=True)
class Waveform:
    """Linear interpolation between ``(time, value)`` knots, constant outside."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(t), float(v)) for t, v in self.knots)
        if not knots:
            raise InvalidArgumentError("a waveform needs at least one knot")
        times = [t for t, _ in knots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidArgumentError("waveform knot times must be strictly increasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_t", np.array(times))
        object.__setattr__(self, "_v", np.array([v for _, v in knots]))

    @classmethod
    def constant(cls, value: float) -> "Waveform":
        return cls(((0.0, value),))

    def __call__(self, t):
        return np.interp(t, self._t, self._v)

    @property
    def last_time(self) -> float:
        return self.knots[-1][0]

    def to_list(self) -> list[list[float]]:
        return [[t, v] for t, v in self.knots]


@dataclass(frozen=True)
class Schedule:
    omega: Waveform
    delta: Waveform
    phi: Waveform
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise InvalidArgumentError("schedule duration must be > 0")
        for name in ("omega", "delta", "phi"):
            if getattr(self, name).last_time > self.duration + 1e-12:
                raise InvalidArgumentError(f"{name} has knots after the schedule duration")

    def at(self, t: float) -> tuple[float, float, float]:
        return float(self.omega(t)), float(self.delta(t)), float(self.phi(t))

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "omega": self.omega.to_list(),
            "delta": self.delta.to_list(),
            "phi": self.phi.to_list(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def stretched(self, factor: float) -> "Schedule":
        """The same pulse shape played ``factor`` times slower."""
        if not factor > 0:
            raise InvalidArgumentError("stretch factor must be > 0")

        def scale(w: Waveform) -> Waveform:
            return Waveform(tuple((t * factor, v) for t, v in w.knots))

        return Schedule(scale(self.omega), scale(self.delta), scale(self.phi), self.duration * factor)

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        try:
            phi = data.get("phi") or [[0.0, 0.0]]
            return cls(
                Waveform(tuple(map(tuple, data["omega"]))),
                Waveform(tuple(map(tuple, data["delta"]))),
                Waveform(tuple(map(tuple, phi))),
                float(data["duration"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed schedule: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


def standard_schedule(
    params: DriveParams | None = None, variant: str = "LSST", duration: float = 4.0, ramp: float = 0.5
) -> Schedule:
    """Adiabatic preparation ramp.

    Ω rises linearly over ``[0, ramp]`` and holds; with ``LSST`` it falls
    back to zero over the final ``ramp``, with ``LSNRD`` it stays on until
    the end. Δ holds at ``-delta`` until ``ramp``, sweeps linearly to
    ``+delta`` at ``duration - ramp`` and then holds. φ is zero.
    """
    params = params or DriveParams()
    variant = variant.upper()
    if variant not in ("LSST", "LSNRD"):
        raise InvalidArgumentError(f"unknown schedule variant {variant!r}")
    if not duration > 2 * ramp:
        raise InvalidArgumentError(f"duration must exceed {2 * ramp} us")
    om = params.omega
    end = 0.0 if variant == "LSST" else om
    omega = Waveform(((0.0, 0.0), (ramp, om), (duration - ramp, om), (duration, end)))
    delta = Waveform(((0.0, -params.delta), (ramp, -params.delta), (duration - ramp, params.delta), (duration, params.delta)))
    return Schedule(omega, delta, Waveform.constant(0.0), duration)


@dataclass(frozen=True)
class EvolutionConfig:
    """Integrator settings.

    ``monitor_every`` steps a step-doubling comparison is made (0 disables
    it); a local discrepancy above ``step_error_tol`` means ``dt`` is too
    coarse and raises :class:`IntegrationError`.
    """

    dt: float = 1e-3
    renormalize: bool = True
    norm_drift_tol: float = 1e-8
    krylov_tol: float = 1e-12
    monitor_every: int = 500
    step_error_tol: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidArgumentError("dt must be > 0")


def expm_krylov(
    apply_a: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    tau: float,
    tol: float = 1e-12,
    max_dim: int = 40,
) -> np.ndarray:
    """``exp(-i tau A) v`` for Hermitian ``A`` via a Lanczos expansion.

    The Krylov space grows until the a-posteriori error estimate
    ``beta_m |[exp(-i tau T)]_{m,0}|`` drops below ``tol * ||v||``; if
    ``max_dim`` is reached first, the step is split in two.
    """
    beta0 = float(np.linalg.norm(v))
    if beta0 == 0.0 or tau == 0.0:
        return np.array(v, dtype=complex)
    dim = v.size
    m_cap = min(max_dim, dim)
    q = np.empty((m_cap + 1, dim), dtype=complex)
    q[0] = v / beta0
    alphas, betas = [], []
    for j in range(m_cap):
        w = apply_a(q[j])
        alpha = np.vdot(q[j], w).real
        w = w - alpha * q[j]
        if j:
            w -= betas[-1] * q[j - 1]
        w -= (q[: j + 1] @ w.conj()).conj() @ q[: j + 1]
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)
        if j == 0:
            theta, vec = np.array([alpha]), np.ones((1, 1))
        else:
            theta, vec = tridiagonal_eigh(np.array(alphas), np.array(betas))
        coef = vec @ (np.exp(-1j * tau * theta) * vec[0].conj())
        breakdown = beta < 1e-14 * max(1.0, abs(alpha))
        if breakdown or beta * abs(coef[-1]) < tol:
            return beta0 * (coef @ q[: j + 1])
        betas.append(beta)
        q[j + 1] = w / beta
    half = expm_krylov(apply_a, v, tau / 2, tol / 2, max_dim)
    return expm_krylov(apply_a, half, tau / 2, tol / 2, max_dim)


# below this dimension each exponential is taken by dense diagonalization
DENSE_EXP_DIM = 64


class _Propagator:
    def __init__(self, op: RydbergOperator, schedule: Schedule, tol: float):
        self.op = op
        self.schedule = schedule
        self.tol = tol
        self._lower = op.drive_csr().toarray().astype(complex) if op.dim <= DENSE_EXP_DIM else None

    def _factor(self, psi, t1, t2, w1, w2, dt):
        o1, d1, p1 = self.schedule.at(t1)
        o2, d2, p2 = self.schedule.at(t2)
        diag = self.op.diagonal(w1 * d1 + w2 * d2, w1 + w2)
        g = 0.5 * (w1 * o1 * np.exp(1j * p1) + w2 * o2 * np.exp(1j * p2))
        if self._lower is not None:
            h = g * self._lower
            h += h.conj().T
            h[np.diag_indices_from(h)] += diag
            w, v = np.linalg.eigh(h)
            return v @ (np.exp(-1j * dt * w) * (v.conj().T @ psi))
        return expm_krylov(lambda x: self.op.apply(x, diag, g), psi, dt, self.tol)

    def step(self, psi: np.ndarray, t: float, dt: float) -> np.ndarray:
        t1, t2 = t + _C1 * dt, t + _C2 * dt
        psi = self._factor(psi, t1, t2, _A2, _A1, dt)
        return self._factor(psi, t1, t2, _A1, _A2, dt)


def evolve(
    initial: StateVector,
    geometry: Geometry,
    schedule: Schedule,
    config: EvolutionConfig | None = None,
    params: DriveParams | None = None,
) -> StateVector:
    """Integrate ``i d|psi>/dt = H(t)|psi>`` from 0 to ``schedule.duration``.

    ``params`` fixes the interaction coefficient ``omega * r_b**6``; the
    drive amplitudes come from ``schedule``.
    """
    config = config or EvolutionConfig()
    params = params or DriveParams()
    if initial.n_atoms != geometry.n_atoms:
        raise InvalidArgumentError("initial state and geometry have different atom counts")
    op = RydbergOperator(geometry, params.c6)
    prop = _Propagator(op, schedule, config.krylov_tol)

    n_steps = max(1, math.ceil(schedule.duration / config.dt - 1e-9))
    dt = schedule.duration / n_steps
    psi = np.array(initial.amplitudes, dtype=complex)
    for s in range(n_steps):
        t = s * dt
        new = prop.step(psi, t, dt)
        if config.monitor_every and s % config.monitor_every == 0:
            half = prop.step(prop.step(psi, t, dt / 2), t + dt / 2, dt / 2)
            err = float(np.linalg.norm(new - half))
            if err > config.step_error_tol:
                raise IntegrationError(
                    f"step-doubling error {err:.3g} at t={t:.4g} us exceeds {config.step_error_tol:.3g}; reduce dt",
                    err,
                )
        psi = new

    norm = float(np.linalg.norm(psi))
    drift = abs(norm - 1.0)
    if config.renormalize:
        return StateVector(psi / norm, initial.n_atoms)
    if drift > config.norm_drift_tol:
        raise IntegrationError(f"norm drifted by {drift:.3g} (tolerance {config.norm_drift_tol:.3g})", drift)
    return StateVector(psi, initial.n_atoms, norm_tol=max(2 * config.norm_drift_tol, 1e-12))


def all_ground(n_atoms: int) -> StateVector:
    """The ``gg...g`` product state (basis index 0)."""
    return StateVector.basis_state(0, n_atoms)
