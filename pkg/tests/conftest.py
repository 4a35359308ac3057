import sys

import numpy as np
import pytest

from antidist import counterexample
from antidist.sdp import AntidistInstance
from antidist.states import StateSet


@pytest.fixture(scope="session")
def paper_states():
    return counterexample.load_states()


@pytest.fixture(scope="session")
def paper_y():
    return counterexample.load_y().y


@pytest.fixture(scope="session")
def paper_instance(paper_states):
    return AntidistInstance.from_states(paper_states)


def basis_states(d):
    return StateSet.from_vectors(np.eye(d))


def two_states(c):
    """Pure qubit states with |<a|b>| = c."""
    return StateSet.from_vectors([[1.0, 0.0], [c, np.sqrt(max(1.0 - c * c, 0.0))]])


def random_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (r.diagonal() / np.abs(r.diagonal()))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
