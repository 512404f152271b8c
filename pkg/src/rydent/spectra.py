"""Ground states by Lanczos iteration, with a dense eigensolver fallback."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError, InvalidArgumentError
from .hamiltonian import DENSE_CAP, HamiltonianMatrix

__all__ = ["StateVector", "EigenResult", "lanczos_lowest", "ground_state", "fix_phase"]

NORM_TOL = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitudes over the 2**N occupation basis."""

    amplitudes: np.ndarray
    n_atoms: int
    norm_tol: float = field(default=NORM_TOL, compare=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != 2**self.n_atoms:
            raise InvalidArgumentError(f"expected {2**self.n_atoms} amplitudes, got {amps.size}")
        drift = abs(np.vdot(amps, amps).real - 1.0)
        if drift > self.norm_tol:
            raise InvalidArgumentError(f"state is not normalized (|norm^2 - 1| = {drift:.3g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, index: int, n_atoms: int) -> "StateVector":
        c = np.zeros(2**n_atoms, dtype=complex)
        c[index] = 1.0
        return cls(c, n_atoms)

    @classmethod
    def normalized(cls, amplitudes, n_atoms: int) -> "StateVector":
        c = np.asarray(amplitudes, dtype=complex)
        return cls(c / np.linalg.norm(c), n_atoms)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class EigenResult:
    energy: float
    state: StateVector
    residual: float
    degenerate: bool = False
    gap: float | None = None
    method: str = "lanczos"


def fix_phase(c: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(c)))
    if c[k] == 0:
        return c
    out = c * (np.conj(c[k]) / abs(c[k]))
    out[k] = abs(c[k])
    return out


def tridiagonal_eigh(alphas: np.ndarray, betas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a real symmetric tridiagonal matrix.

    LAPACK's MRRR driver occasionally fails on clustered Ritz values; the
    dense solver is the fallback.
    """
    try:
        return sla.eigh_tridiagonal(alphas, betas, check_finite=False)
    except np.linalg.LinAlgError:
        t = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        return np.linalg.eigh(t)


def _random_unit(rng: np.random.Generator, dim: int, against: np.ndarray | None = None) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if against is not None:
        v -= against * np.vdot(against, v)
    return v / np.linalg.norm(v)


def lanczos_lowest(
    apply_h: Callable[[np.ndarray], np.ndarray],
    dim: int,
    tol: float = 1e-10,
    max_iter: int = 300,
    seed: int = 0,
    max_restarts: int = 8,
    scale: float | None = None,
    check_every: int = 4,
) -> EigenResult:
    """Lowest eigenpair of a Hermitian operator by Lanczos with full reorthogonalization.

    Convergence is declared when ``||H x - E x|| <= tol * scale``; ``scale``
    defaults to the largest Ritz value magnitude seen, i.e. an estimate of
    ``||H||``. After ``max_iter`` Krylov steps the iteration restarts from the
    current Ritz vector; an invariant subspace that does not contain a
    converged pair triggers a restart from a fresh seeded vector.

    Raises
    ------
    ConvergenceError
        if no restart cycle converges; carries the best residual seen.
    """
    rng = np.random.default_rng(seed)
    v = _random_unit(rng, dim)
    max_iter = max(1, min(max_iter, dim))
    best = (np.inf, None, None)
    norm_est = 0.0

    for _ in range(max_restarts + 1):
        basis = np.empty((max_iter + 1, dim), dtype=complex)
        alphas, betas = [], []
        basis[0] = v
        broke_down = False
        x = theta = None
        for j in range(max_iter):
            w = np.asarray(apply_h(basis[j]), dtype=complex)
            alpha = np.vdot(basis[j], w).real
            w = w - alpha * basis[j]
            if j > 0:
                w -= betas[-1] * basis[j - 1]
            for _ in range(2):
                w -= (basis[: j + 1] @ w.conj()).conj() @ basis[: j + 1]
            beta = float(np.linalg.norm(w))
            alphas.append(alpha)

            norm_est = max(norm_est, abs(alpha) + beta)
            thresh = tol * (scale if scale is not None else max(norm_est, np.finfo(float).tiny))
            broke_down = beta <= 1e-13 * max(norm_est, 1.0)
            last = j == max_iter - 1
            if broke_down or last or (j + 1) % check_every == 0:
                if j == 0:
                    ev, vec = np.array([alpha]), np.ones((1, 1))
                else:
                    ev, vec = tridiagonal_eigh(np.array(alphas), np.array(betas))
                norm_est = max(norm_est, float(np.abs(ev).max()))
                theta, y = float(ev[0]), vec[:, 0]
                est = beta * abs(y[-1])
                if est <= thresh or broke_down or last:
                    x = y @ basis[: j + 1]
                    x /= np.linalg.norm(x)
                    res = float(np.linalg.norm(apply_h(x) - theta * x))
                    if res < best[0]:
                        best = (res, theta, x)
                    if res <= thresh:
                        return EigenResult(theta, StateVector(fix_phase(x), _n_atoms(dim)), res)
                    if broke_down or last:
                        break
            betas.append(beta)
            basis[j + 1] = w / beta
        v = _random_unit(rng, dim) if (broke_down or x is None) else x

    raise ConvergenceError(
        f"Lanczos did not converge after {max_restarts} restarts (best residual {best[0]:.3g})",
        best[0],
    )


def _n_atoms(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if 2**n != dim:
        raise InvalidArgumentError(f"dimension {dim} is not a power of two")
    return n


def _dense_lowest(h: HamiltonianMatrix) -> tuple[EigenResult, float]:
    w, v = np.linalg.eigh(h.toarray())
    x = fix_phase(v[:, 0])
    res = float(np.linalg.norm(h.matvec(x) - w[0] * x))
    gap = float(w[1] - w[0]) if len(w) > 1 else np.inf
    return EigenResult(float(w[0]), StateVector(x / np.linalg.norm(x), h.n_atoms), res, method="dense"), gap


def ground_state(
    h: HamiltonianMatrix,
    tol: float = 1e-10,
    seed: int = 0,
    method: str = "lanczos",
    check_degeneracy: bool = True,
    degeneracy_tol: float = 1e-8,
) -> EigenResult:
    """Lowest eigenpair of ``h``.

    ``tol`` is relative to the Gershgorin bound on ``||H||``. The default
    method is Lanczos; if it fails to converge and the system fits the dense
    cap, the dense eigensolver takes over. ``method="dense"`` skips Lanczos.

    With ``check_degeneracy`` the second eigenvalue is computed as well
    (deflated Lanczos or the dense spectrum) and the result is flagged
    ``degenerate`` when the gap is below ``degeneracy_tol * ||H||``.
    """
    scale = h.norm_bound
    if method not in ("lanczos", "dense"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    if h.dim == 1:
        e = float(h.diagonal[0])
        return EigenResult(e, StateVector.basis_state(0, 0), 0.0, gap=np.inf, method="dense")

    gap = None
    if method == "dense":
        result, gap = _dense_lowest(h)
    else:
        try:
            result = lanczos_lowest(h.matvec, h.dim, tol=tol, seed=seed, scale=scale)
        except ConvergenceError:
            if h.n_atoms > DENSE_CAP:
                raise
            result, gap = _dense_lowest(h)
        if check_degeneracy and gap is None:
            x = result.state.amplitudes
            shift = 3.0 * scale

            # found vector pushed above the spectrum; lowest of the rest is E_1
            def deflated(v):
                v = v - x * np.vdot(x, v)
                w = h.matvec(v)
                return w - x * np.vdot(x, w) + shift * x * np.vdot(x, v)

            try:
                second = lanczos_lowest(deflated, h.dim, tol=max(tol, 1e-8), seed=seed + 1, scale=scale)
                gap = second.energy - result.energy
            except ConvergenceError:
                if h.n_atoms > DENSE_CAP:
                    raise
                gap = _dense_lowest(h)[1]

    degenerate = bool(check_degeneracy and gap is not None and gap <= degeneracy_tol * scale)
    return EigenResult(
        result.energy, result.state, result.residual, degenerate, gap if check_degeneracy else None, result.method
    )
