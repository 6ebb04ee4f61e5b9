import numpy as np
import pytest

from cohamp.machine import MachineParams
from cohamp.qstate import qubit_state

# Bloch-disk atoms used across the amplification checks: one ground-biased
# (south, delta < 0) and its mirror image in the north.
SOUTH = (-0.6, 0.2)
NORTH = (0.6, 0.2)


@pytest.fixture
def params():
    return MachineParams()


@pytest.fixture
def south_atom():
    return qubit_state(*SOUTH)


@pytest.fixture
def north_atom():
    return qubit_state(*NORTH)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_params(rng, **fixed):
    """Machine parameters in the weak-coupling window, drawn uniformly."""
    e1 = rng.uniform(0.5, 2.0)
    kw = dict(
        E1=e1,
        E2=e1 + rng.uniform(0.3, 2.0),
        beta1=rng.uniform(0.2, 3.0),
        beta2=rng.uniform(0.05, 3.0),
        gamma0_1=rng.uniform(5e-4, 5e-3),
        gamma0_2=rng.uniform(5e-4, 5e-3),
        r=rng.uniform(0.1, 5.0),
        phi=rng.uniform(0.002, 0.03),
    )
    kw.update(fixed)
    return MachineParams(**kw)


def random_atom(rng, rmax=0.97):
    """Mixed qubit strictly inside the Bloch ball with a random phase."""
    z = rng.uniform(-rmax, rmax)
    rad = np.sqrt(rmax**2 - z * z) * np.sqrt(rng.uniform(0.0, 1.0))
    return qubit_state(z, rad * np.exp(1j * rng.uniform(0, 2 * np.pi)) / 2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
