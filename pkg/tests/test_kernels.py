import numpy as np
import pytest

from tulczyjew import _backend
from tulczyjew._backend import KERNEL_NAMES, get_kernels
from tulczyjew.lie import builtin_algebra

try:
    compiled = get_kernels("compiled")
except ImportError:  # extension not built
    compiled = None

py = get_kernels("python")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def test_both_modules_expose_every_kernel():
    for name in KERNEL_NAMES:
        assert callable(getattr(py, name))
        if compiled is not None:
            assert callable(getattr(compiled, name))


def test_backend_flag_is_consistent():
    assert _backend.BACKEND in ("compiled", "python")
    expected = py if _backend.BACKEND == "python" else compiled
    assert _backend.kernels is expected


def test_unknown_backend_name():
    with pytest.raises(ValueError):
        get_kernels("fortran")


def test_env_var_forces_python(monkeypatch):
    monkeypatch.setenv("TULCZYJEW_PURE_PYTHON", "1")
    mod, name = _backend._load()
    assert name == "python" and mod is py


@pytest.mark.parametrize("name", ["so3", "se3", "sl2", "heisenberg3"])
def test_expm_against_scipy(name, rng):
    from scipy.linalg import expm as scipy_expm

    A = builtin_algebra(name)
    for scale in (1e-8, 0.1, 1.0, 10.0):
        M = A.ad(rng.normal(size=A.dim) * scale)
        np.testing.assert_allclose(py.expm(M), scipy_expm(M), rtol=1e-12, atol=1e-13)


def test_expm_zero():
    np.testing.assert_array_equal(py.expm(np.zeros((4, 4))), np.eye(4))


@needs_compiled
@pytest.mark.parametrize("name", ["so3", "se3", "sl2", "heisenberg3"])
def test_algebraic_kernels_agree(name, rng):
    A = builtin_algebra(name)
    c = np.ascontiguousarray(A.c)
    for _ in range(50):
        x, y = rng.normal(size=(2, A.dim))
        np.testing.assert_allclose(compiled.bracket(c, x, y), py.bracket(c, x, y), atol=1e-14)
        np.testing.assert_allclose(compiled.ad_star(c, x, y), py.ad_star(c, x, y), atol=1e-14)
        np.testing.assert_allclose(compiled.ad_matrix(c, x), py.ad_matrix(c, x), atol=1e-14)
        M = py.ad_matrix(c, 3 * x)
        np.testing.assert_allclose(compiled.expm(M), py.expm(M), rtol=1e-13, atol=1e-13)


@needs_compiled
@pytest.mark.parametrize("name", ["so3", "se3", "heisenberg3"])
def test_time_stepping_kernels_agree(name):
    A = builtin_algebra(name)
    c = np.ascontiguousarray(A.c)
    inertia = np.diag(np.arange(1.0, A.dim + 1))
    inv = np.linalg.inv(inertia)
    x0 = np.linspace(0.3, 1.1, A.dim)
    a = compiled.rk4_lie_poisson_quadratic(c, inv, np.zeros(A.dim), x0, 1e-3, 500)
    b = py.rk4_lie_poisson_quadratic(c, inv, np.zeros(A.dim), x0, 1e-3, 500)
    assert a.shape == (501, A.dim)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)
    a = compiled.rk4_euler_poincare_quadratic(c, inertia, inv, x0, 1e-3, 500)
    b = py.rk4_euler_poincare_quadratic(c, inertia, inv, x0, 1e-3, 500)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)
