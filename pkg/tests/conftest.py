import numpy as np
import pytest

from tulczyjew.lie import builtin_algebra

BUILTINS = ["so3", "se3", "sl2", "heisenberg3", "abelian(4)"]


@pytest.fixture(params=BUILTINS)
def algebra(request):
    return builtin_algebra(request.param)


@pytest.fixture
def so3():
    return builtin_algebra("so3")


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def rodrigues(axis_angle):
    """Rotation matrix from an axis-angle vector (closed form)."""
    v = np.asarray(axis_angle, dtype=float)
    th = np.linalg.norm(v)
    if th == 0:
        return np.eye(3)
    k = v / th
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(th) * K + (1 - np.cos(th)) * K @ K


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
