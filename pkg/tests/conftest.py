import numpy as np
import pytest

from milburn.fock import OscillatorParams, TruncationPolicy

_ACCEPTANCE_LINES = []


@pytest.fixture
def fig_params():
    return OscillatorParams(omega=4.0, lambda_=0.7, gamma=10.0)


@pytest.fixture
def policy64():
    return TruncationPolicy(fock_cutoff=64)


@pytest.fixture
def policy96():
    return TruncationPolicy(fock_cutoff=96)


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(criterion, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return record


def resolved_block(op, band=8, tol=1e-16):
    """Number of leading columns of ``op`` with negligible weight in the top ``band`` levels."""
    edge = np.sum(np.abs(op[-band:, :]) ** 2, axis=0)
    bad = np.nonzero(edge > tol)[0]
    return int(bad[0]) if bad.size else op.shape[1]


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
