import functools
from pathlib import Path

import numpy as np
import pytest

from rydent import DriveParams, build, chain, ground_state, half_partition, report

R_B = 8.375
DATA = Path(__file__).parent / "data"


@functools.lru_cache(maxsize=None)
def chain_ground(rb_over_ax: float, n_atoms: int = 10):
    """Cached 10-atom chain ground state at the default drive."""
    geom = chain(n_atoms, R_B / rb_over_ax)
    res = ground_state(build(geom, DriveParams()))
    return res, report(res.state, half_partition(geom))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, n_atoms):
    from rydent import StateVector

    c = rng.standard_normal(2**n_atoms) + 1j * rng.standard_normal(2**n_atoms)
    return StateVector.normalized(c, n_atoms)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
