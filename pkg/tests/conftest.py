import numpy as np
import pytest

from measnoise import hilbert as hb

X, Y, Z, I2 = hb.PAULI_X, hb.PAULI_Y, hb.PAULI_Z, hb.PAULI_I

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_Y = np.array([1, 1j], dtype=complex) / np.sqrt(2)

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return hb.rng_stream(20240611)


@pytest.fixture
def acceptance_log():
    """Collects one pass/fail line per acceptance criterion."""
    def record(criterion, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
