import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain_ground
from rydent import DriveParams, StateVector, build, chain, ground_state, lanczos_lowest, ladder, probabilities, shannon
from rydent.errors import ConvergenceError, InvalidArgumentError
from rydent.spectra import fix_phase

OMEGA, DELTA = 5 * np.pi, 17.5 * np.pi


def test_single_atom_closed_form():
    res = ground_state(build(chain(1, 1.0), DriveParams()))
    assert res.energy == pytest.approx((-DELTA - np.hypot(DELTA, OMEGA)) / 2, rel=1e-12)
    p_r = abs(res.state.amplitudes[1]) ** 2
    theta = np.arctan(OMEGA / DELTA)
    assert p_r == pytest.approx(np.cos(theta / 2) ** 2, abs=1e-10)
    assert round(p_r, 3) == 0.981


@pytest.mark.parametrize("geom", [chain(4, 6.0), ladder(2, 5.0, 7.0), chain(6, 9.0)])
def test_zero_drive_gives_basis_state(geom):
    res = ground_state(build(geom, DriveParams(omega=0.0, delta=10.0, r_b=8.375)), method="dense")
    p = probabilities(res.state)
    assert len(p) == 1
    assert shannon(p) == 0.0
    h = build(geom, DriveParams(omega=0.0, delta=10.0, r_b=8.375))
    assert p.indices[0] == int(np.argmin(h.diagonal))


def test_chain_peak_most_probable():
    res, _ = chain_ground(1.1)
    from rydent import probabilities

    (s, p), = probabilities(res.state).most_probable(1)
    assert s == "rrrrrrrrrr"
    assert p == pytest.approx(0.036, abs=1e-3)


def test_lanczos_identity():
    res = lanczos_lowest(lambda v: v, 16)
    assert res.energy == pytest.approx(1.0)
    assert np.linalg.norm(res.state.amplitudes) == pytest.approx(1.0)


def test_lanczos_diagonal():
    d = np.arange(32.0)
    res = lanczos_lowest(lambda v: d * v, 32, tol=1e-12)
    assert res.energy == pytest.approx(0.0, abs=1e-10)
    assert abs(res.state.amplitudes[0]) == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.floats(2.0, 15.0), st.floats(0.5, 30), st.floats(-40, 40), st.floats(-3, 3), st.integers(0, 5))
def test_lanczos_matches_dense(n, a, omega, delta, phi, seed):
    h = build(chain(n, a), DriveParams(omega=omega, delta=delta, phi=phi))
    w, vecs = np.linalg.eigh(h.toarray())
    res = ground_state(h, seed=seed)
    assert abs(res.energy - w[0]) <= 1e-9 * max(1.0, h.norm_bound)
    assert res.residual <= 1e-10 * h.norm_bound
    gap = w[1] - w[0]
    if gap > 1e-6 * h.norm_bound:
        overlap = abs(np.vdot(vecs[:, 0], res.state.amplitudes))
        assert overlap == pytest.approx(1.0, abs=1e-8)


def test_rayleigh_quotient_bound(rng):
    h = build(ladder(3, 6.0, 5.0), DriveParams(phi=0.2))
    res = ground_state(h)
    assert np.linalg.norm(h @ res.state.amplitudes - res.energy * res.state.amplitudes) <= 1e-10 * h.norm_bound
    for _ in range(100):
        v = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
        v /= np.linalg.norm(v)
        assert res.energy <= np.vdot(v, h @ v).real + 1e-9


def test_phase_fixed_and_deterministic():
    h = build(chain(6, 6.0), DriveParams(phi=1.1))
    a, b = ground_state(h, seed=3), ground_state(h, seed=3)
    assert np.array_equal(a.state.amplitudes, b.state.amplitudes)
    c = a.state.amplitudes
    k = np.argmax(np.abs(c))
    assert c[k].imag == 0 and c[k].real > 0
    other = ground_state(h, seed=7).state.amplitudes
    assert np.allclose(other, c, atol=1e-8)
    assert np.allclose(fix_phase(1j * c), c)


def test_dense_method_and_lanczos_agree():
    h = build(chain(8, 5.0))
    d, l = ground_state(h, method="dense"), ground_state(h)
    assert d.method == "dense" and l.method == "lanczos"
    assert d.energy == pytest.approx(l.energy, abs=1e-9 * h.norm_bound)
    with pytest.raises(InvalidArgumentError):
        ground_state(h, method="arnoldi")


def test_degeneracy_flag():
    # decoupled atoms at zero detuning with zero drive: every configuration has E = 0
    h = build(chain(3, 1000.0), DriveParams(omega=0.0, delta=0.0))
    assert ground_state(h, method="dense").degenerate
    # two far-apart atoms with delta > 0 and weak drive: unique ground state
    h = build(chain(4, 6.0))
    res = ground_state(h)
    assert not res.degenerate and res.gap > 0


def test_convergence_error_carries_residual():
    d = np.linspace(0, 1, 200)
    with pytest.raises(ConvergenceError) as exc:
        lanczos_lowest(lambda v: d * v, 200, tol=1e-16, max_iter=3, max_restarts=1, scale=1.0)
    assert exc.value.best_residual > 0


def test_state_vector_validation():
    with pytest.raises(InvalidArgumentError):
        StateVector(np.ones(4), 2)
    with pytest.raises(InvalidArgumentError):
        StateVector(np.ones(3) / np.sqrt(3), 2)
    s = StateVector.basis_state(2, 2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1
