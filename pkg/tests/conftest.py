import numpy as np
import pytest

from qubitbell.quantum import (
    LocalMeasurement,
    QuantumStrategy,
    qubit_observable_measurement,
    singlet_state,
)
from qubitbell.scenario import chsh_functional, from_lower_bound


ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def unit(d, i):
    e = np.zeros(d, dtype=complex)
    e[i] = 1
    return e


def proj(*vectors):
    """Projector onto the span of the given (orthonormal) vectors."""
    if not vectors:
        return None
    v = np.column_stack(vectors)
    return v @ v.conj().T


def two_angle_measurement(t1=np.pi / 5, t2=np.pi / 7):
    """d=4 party: A(1|1) onto span{e1,e2}, A(1|2) onto the two rotated vectors."""
    e = [unit(4, i) for i in range(4)]
    a11 = proj(e[0], e[1])
    a12 = proj(np.cos(t1) * e[0] + np.sin(t1) * e[2], np.cos(t2) * e[1] + np.sin(t2) * e[3])
    return LocalMeasurement.from_outcome_one(a11, a12)


def make_chsh_strategy():
    """Singlet with angles giving C11 + C12 + C21 - C22 = -2 sqrt 2."""
    return QuantumStrategy(
        singlet_state(),
        (qubit_observable_measurement([0, np.pi / 2]),
         qubit_observable_measurement([np.pi / 4, -np.pi / 4])),
    )


def make_chsh_lower():
    """CHSH + 2 >= 0 in homogeneous form; the singlet above gives 2 - 2 sqrt 2."""
    return from_lower_bound(chsh_functional(), -2)


@pytest.fixture
def chsh_strategy():
    return make_chsh_strategy()


@pytest.fixture
def chsh_lower():
    return make_chsh_lower()
