import numpy as np
import pytest

from tulczyjew.errors import DegenerateLagrangian, DimensionMismatch, GradientFailure, NewtonDivergence
from tulczyjew.models import (
    CustomHamiltonian,
    CustomLagrangian,
    CustomProductHamiltonian,
    LegendreHamiltonian,
    QuadraticHamiltonian,
    QuadraticLagrangian,
    QuadraticProductHamiltonian,
    energy,
    fd_gradient,
    fd_hessian,
    hamiltonian_from_lagrangian,
    inverse_legendre,
    legendre,
)


def test_quadratic_hamiltonian_value_and_gradient():
    h = QuadraticHamiltonian(np.diag([1.0, 0.5, 0.25]), b=[1.0, 0.0, 0.0])
    assert h.value([1.0, 2.0, 4.0]) == pytest.approx(0.5 * (1 + 2 + 4) + 1)
    np.testing.assert_array_equal(h.gradient([1.0, 2.0, 4.0]), [2.0, 1.0, 1.0])


def test_quadratic_hamiltonian_rejects_asymmetric():
    with pytest.raises(ValueError):
        QuadraticHamiltonian([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(DimensionMismatch):
        QuadraticHamiltonian(np.eye(2), b=[1.0])


def test_from_inertia():
    h = QuadraticHamiltonian.from_inertia([1.0, 2.0, 4.0])
    np.testing.assert_allclose(h.W, np.diag([1.0, 0.5, 0.25]))


def test_fd_gradient_polynomial(rng):
    f = lambda x: x[0] ** 3 + x[0] * x[1] ** 2
    x = rng.normal(size=2)
    exact = [3 * x[0] ** 2 + x[1] ** 2, 2 * x[0] * x[1]]
    np.testing.assert_allclose(fd_gradient(f, x), exact, atol=1e-8)


def test_fd_hessian_symmetric_and_accurate(rng):
    f = lambda x: np.sin(x[0]) * x[1] ** 2 + x[2] * x[0]
    x = rng.normal(size=3)
    H = fd_hessian(f, x)
    assert np.array_equal(H, H.T)
    exact = np.array(
        [
            [-np.sin(x[0]) * x[1] ** 2, 2 * x[1] * np.cos(x[0]), 1.0],
            [2 * x[1] * np.cos(x[0]), 2 * np.sin(x[0]), 0.0],
            [1.0, 0.0, 0.0],
        ]
    )
    np.testing.assert_allclose(H, exact, atol=1e-7)


def test_custom_hamiltonian_fd_fallback():
    h = CustomHamiltonian(lambda p: 0.5 * p @ p + p[0] ** 4 / 4, 3)
    p = np.array([0.5, 1.0, -2.0])
    np.testing.assert_allclose(h.gradient(p), p + np.array([p[0] ** 3, 0, 0]), atol=1e-8)
    assert not h.has_closed_form_hessian


def test_custom_hamiltonian_bad_gradient_shape():
    h = CustomHamiltonian(lambda p: p @ p, 3, gradient=lambda p: p[:2])
    with pytest.raises(GradientFailure):
        h.gradient(np.ones(3))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_custom_hamiltonian_nonfinite():
    h = CustomHamiltonian(lambda p: np.log(p[0]), 3)
    with pytest.raises(GradientFailure):
        h.value(np.array([-1.0, 0, 0]))


def test_gradient_error_reports_mismatch():
    good = CustomHamiltonian(lambda p: 0.5 * p @ p, 2, gradient=lambda p: p)
    bad = CustomHamiltonian(lambda p: 0.5 * p @ p, 2, gradient=lambda p: 2 * p)
    assert good.gradient_error([1.0, 2.0]) < 1e-8
    assert bad.gradient_error([1.0, 2.0]) > 0.5


def test_quadratic_lagrangian_legendre_round_trip(rng):
    l = QuadraticLagrangian([[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 3.0]])
    for _ in range(20):
        x = rng.normal(size=3)
        np.testing.assert_allclose(inverse_legendre(l, legendre(l, x)), x, atol=1e-13)
        assert energy(l, x) == pytest.approx(l.value(x), rel=1e-13)


def test_quadratic_lagrangian_rejects_indefinite():
    with pytest.raises(DegenerateLagrangian):
        QuadraticLagrangian(np.diag([1.0, -1.0, 1.0]))


def test_hamiltonian_of_quadratic_lagrangian(rng):
    l = QuadraticLagrangian([1.0, 2.0, 3.0])
    h = hamiltonian_from_lagrangian(l)
    x = rng.normal(size=3)
    assert h.value(legendre(l, x)) == pytest.approx(energy(l, x), rel=1e-13)


def test_custom_lagrangian_legendre_hamiltonian(rng):
    # l = 1/2 |xi|^2 + 1/4 xi_1^4 is hyperregular
    l = CustomLagrangian(lambda x: 0.5 * x @ x + 0.25 * x[0] ** 4, 3)
    h = hamiltonian_from_lagrangian(l)
    assert isinstance(h, LegendreHamiltonian)
    x = rng.normal(size=3)
    pi = legendre(l, x)
    np.testing.assert_allclose(pi, x + np.array([x[0] ** 3, 0, 0]), atol=1e-7)
    np.testing.assert_allclose(h.gradient(pi), x, atol=1e-6)
    assert h.value(pi) == pytest.approx(energy(l, x), rel=1e-8)


def test_custom_lagrangian_degenerate():
    l = CustomLagrangian(lambda x: 0.5 * x[0] ** 2 + 0.5 * x[1] ** 2, 3)
    with pytest.raises(DegenerateLagrangian):
        inverse_legendre(l, np.ones(3))


def test_inverse_legendre_divergence():
    # gradient never reaches the target
    l = CustomLagrangian(lambda x: np.sum(np.sqrt(1 + x**2)), 1)
    with pytest.raises((NewtonDivergence, DegenerateLagrangian)):
        inverse_legendre(l, np.array([5.0]), max_iter=10)


def test_product_hamiltonian_gradients_against_fd(rng):
    h = QuadraticProductHamiltonian(
        np.diag([1.0, 0.5, 0.25]), np.eye(1), K=np.eye(1), C=np.array([[0.1, 0.2, 0.3]])
    )
    pi, x, p = rng.normal(size=3), rng.normal(size=1), rng.normal(size=1)
    gpi, gx, gp = h.gradients(pi, x, p)
    flat = np.concatenate([pi, x, p])
    fd = fd_gradient(lambda z: h.value(z[:3], z[3:4], z[4:]), flat)
    np.testing.assert_allclose(np.concatenate([gpi, gx, gp]), fd, atol=1e-8)


def test_custom_product_hamiltonian_fd(rng):
    h = CustomProductHamiltonian(lambda pi, x, p: pi @ pi * (1 + x @ x) + p @ p, 3, 2)
    pi, x, p = rng.normal(size=3), rng.normal(size=2), rng.normal(size=2)
    gpi, gx, gp = h.gradients(pi, x, p)
    np.testing.assert_allclose(gpi, 2 * pi * (1 + x @ x), atol=1e-7)
    np.testing.assert_allclose(gx, 2 * x * (pi @ pi), atol=1e-7)
    np.testing.assert_allclose(gp, 2 * p, atol=1e-7)


def test_product_dimension_checks():
    with pytest.raises(DimensionMismatch):
        QuadraticProductHamiltonian(np.eye(3), np.eye(2), C=np.zeros((3, 3)))
