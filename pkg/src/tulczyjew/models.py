"""Reduced Hamiltonians and Lagrangians with gradient and Hessian oracles.

Quadratic models carry closed-form derivatives.  Custom models take a value
callable and optional gradient/Hessian callables; missing derivatives fall
back to central finite differences.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateLagrangian, DimensionMismatch, GradientFailure, NewtonDivergence

SYMMETRY_TOL = 1e-13
FD_GRAD_STEP = 1e-6
# second differences lose two digits per halving of the step; eps**(1/4)
FD_HESS_STEP = 1e-4
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
NOISE_TOL = 1e-8


def _step(x, rel):
    return rel * max(1.0, float(np.max(np.abs(x))) if x.size else 1.0)


def fd_gradient(f, x, rel=FD_GRAD_STEP):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    h = _step(x, rel)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def fd_jacobian(F, x, rel=FD_GRAD_STEP):
    """Central-difference Jacobian ``J[i, j] = dF_i / dx_j`` of a vector function."""
    x = np.asarray(x, dtype=float)
    h = _step(x, rel)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((np.asarray(F(x + e)) - np.asarray(F(x - e))) / (2.0 * h))
    return np.column_stack(cols) if cols else np.zeros((0, 0))


def fd_hessian(f, x, rel=FD_HESS_STEP):
    """Four-point central second differences; symmetric by construction."""
    x = np.asarray(x, dtype=float)
    h = _step(x, rel)
    n = x.size
    H = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        for j in range(i, n):
            ej = np.zeros(n)
            ej[j] = h
            v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)
            H[i, j] = H[j, i] = v
    return H


def _checked(v, shape, what):
    try:
        v = np.asarray(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise GradientFailure(f"{what} oracle returned a non-numeric value") from exc
    if v.shape != shape:
        raise GradientFailure(f"{what} oracle returned shape {v.shape}, expected {shape}")
    if not np.all(np.isfinite(v)):
        raise GradientFailure(f"{what} is not finite")
    return v


def _symmetric(M, what):
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.T)) > SYMMETRY_TOL * scale:
        raise ValueError(f"{what} is not symmetric")
    M.setflags(write=False)
    return M


class QuadraticHamiltonian:
    """``h(pi) = 1/2 pi^T W pi + <b, pi>``."""

    def __init__(self, W, b=None):
        self.W = _symmetric(W, "W")
        self.dim = self.W.shape[0]
        self.b = np.zeros(self.dim) if b is None else np.asarray(b, dtype=float)
        if self.b.shape != (self.dim,):
            raise DimensionMismatch(f"b has shape {self.b.shape}, expected ({self.dim},)")

    @classmethod
    def from_inertia(cls, inertia):
        """Free rigid-body style ``h = 1/2 pi^T I^{-1} pi``."""
        return hamiltonian_from_lagrangian(QuadraticLagrangian(inertia))

    def value(self, pi):
        pi = np.asarray(pi, dtype=float)
        return float(0.5 * pi @ self.W @ pi + self.b @ pi)

    def gradient(self, pi):
        return self.W @ np.asarray(pi, dtype=float) + self.b

    def hessian(self, pi=None):
        return self.W

    def __repr__(self):
        return f"QuadraticHamiltonian(dim={self.dim})"


class CustomHamiltonian:
    """Hamiltonian on ``g*`` from a value callable and optional derivative callables."""

    def __init__(self, value, dim, gradient=None, hessian=None):
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self.dim = int(dim)

    def value(self, pi):
        v = float(self._value(np.asarray(pi, dtype=float)))
        if not np.isfinite(v):
            raise GradientFailure(f"h is not finite at {pi}")
        return v

    def gradient(self, pi):
        pi = np.asarray(pi, dtype=float)
        if self._gradient is not None:
            return _checked(self._gradient(pi), (self.dim,), "gradient")
        return _checked(fd_gradient(self.value, pi), (self.dim,), "finite-difference gradient")

    def hessian(self, pi):
        pi = np.asarray(pi, dtype=float)
        if self._hessian is not None:
            return _checked(self._hessian(pi), (self.dim, self.dim), "Hessian")
        return _checked(fd_hessian(self.value, pi), (self.dim, self.dim), "finite-difference Hessian")

    @property
    def has_closed_form_hessian(self):
        return self._hessian is not None

    def gradient_error(self, pi):
        """Max deviation of the gradient oracle from central differences of the value."""
        pi = np.asarray(pi, dtype=float)
        return float(np.max(np.abs(self.gradient(pi) - fd_gradient(self.value, pi))))

    def __repr__(self):
        return f"CustomHamiltonian(dim={self.dim})"


class QuadraticProductHamiltonian:
    """Hamiltonian on ``g* x T*R^n``.

    ``h = 1/2 pi^T W pi + <b, pi> + 1/2 p^T Wp p + 1/2 x^T K x + <k, x> + x^T C pi``
    """

    def __init__(self, W, Wp, K=None, b=None, k=None, C=None):
        self.group = QuadraticHamiltonian(W, b)
        self.dim = self.group.dim
        self.Wp = _symmetric(Wp, "Wp")
        self.n = self.Wp.shape[0]
        self.K = _symmetric(np.zeros((self.n, self.n)) if K is None else K, "K")
        self.k = np.zeros(self.n) if k is None else np.asarray(k, dtype=float)
        self.C = np.zeros((self.n, self.dim)) if C is None else np.asarray(C, dtype=float)
        if self.K.shape != (self.n, self.n) or self.k.shape != (self.n,):
            raise DimensionMismatch("potential terms do not match the base dimension")
        if self.C.shape != (self.n, self.dim):
            raise DimensionMismatch(f"coupling C must be {(self.n, self.dim)}, got {self.C.shape}")

    def value(self, pi, x, p):
        pi, x, p = (np.asarray(a, dtype=float) for a in (pi, x, p))
        return float(
            self.group.value(pi) + 0.5 * p @ self.Wp @ p + 0.5 * x @ self.K @ x + self.k @ x + x @ self.C @ pi
        )

    def gradients(self, pi, x, p):
        """``(dh/dpi, dh/dx, dh/dp)``."""
        pi, x, p = (np.asarray(a, dtype=float) for a in (pi, x, p))
        return (
            self.group.gradient(pi) + self.C.T @ x,
            self.K @ x + self.k + self.C @ pi,
            self.Wp @ p,
        )


class CustomProductHamiltonian:
    """Product Hamiltonian from a value callable ``h(pi, x, p)``; derivatives by differences."""

    def __init__(self, value, dim, n, gradients=None):
        self._value = value
        self._gradients = gradients
        self.dim = int(dim)
        self.n = int(n)

    def value(self, pi, x, p):
        return float(self._value(*(np.asarray(a, dtype=float) for a in (pi, x, p))))

    def gradients(self, pi, x, p):
        pi, x, p = (np.asarray(a, dtype=float) for a in (pi, x, p))
        if self._gradients is not None:
            gpi, gx, gp = self._gradients(pi, x, p)
            return (
                _checked(gpi, (self.dim,), "dh/dpi"),
                _checked(gx, (self.n,), "dh/dx"),
                _checked(gp, (self.n,), "dh/dp"),
            )
        d, n = self.dim, self.n
        flat = np.concatenate([pi, x, p])
        g = fd_gradient(lambda z: self._value(z[:d], z[d : d + n], z[d + n :]), flat)
        g = _checked(g, (d + 2 * n,), "finite-difference gradient")
        return g[:d], g[d : d + n], g[d + n :]


class QuadraticLagrangian:
    """``l(xi) = 1/2 xi^T I xi`` with ``I`` symmetric positive definite."""

    def __init__(self, inertia):
        inertia = np.asarray(inertia, dtype=float)
        if inertia.ndim == 1:
            inertia = np.diag(inertia)
        self.inertia = _symmetric(inertia, "inertia")
        self.dim = self.inertia.shape[0]
        try:
            self._chol = np.linalg.cholesky(self.inertia)
        except np.linalg.LinAlgError as exc:
            raise DegenerateLagrangian("inertia is not positive definite") from exc
        inv = np.linalg.inv(self.inertia)
        self.inertia_inv = 0.5 * (inv + inv.T)

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        return float(0.5 * xi @ self.inertia @ xi)

    def gradient(self, xi):
        return self.inertia @ np.asarray(xi, dtype=float)

    def hessian(self, xi=None):
        return self.inertia

    def solve_hessian(self, xi, rhs):
        y = np.linalg.solve(self._chol, rhs)
        return np.linalg.solve(self._chol.T, y)

    def __repr__(self):
        return f"QuadraticLagrangian(dim={self.dim})"


class CustomLagrangian:
    """Reduced Lagrangian from callables; Hessian must stay invertible (hyperregularity)."""

    COND_LIMIT = 1e12

    def __init__(self, value, dim, gradient=None, hessian=None):
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self.dim = int(dim)

    def value(self, xi):
        return float(self._value(np.asarray(xi, dtype=float)))

    def gradient(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self._gradient is not None:
            return _checked(self._gradient(xi), (self.dim,), "gradient")
        return _checked(fd_gradient(self.value, xi), (self.dim,), "finite-difference gradient")

    def hessian(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self._hessian is not None:
            return _checked(self._hessian(xi), (self.dim, self.dim), "Hessian")
        if self._gradient is not None:
            H = fd_jacobian(self.gradient, xi)
            return 0.5 * (H + H.T)
        return fd_hessian(self.value, xi)

    def solve_hessian(self, xi, rhs):
        H = self.hessian(xi)
        if not np.all(np.isfinite(H)) or np.linalg.cond(H) > self.COND_LIMIT:
            raise DegenerateLagrangian(f"fiber Hessian is singular at xi={xi}")
        return np.linalg.solve(H, rhs)


def legendre(l, xi):
    """Reduced Legendre transform ``F_l(xi) = dl/dxi``."""
    return l.gradient(xi)


def energy(l, xi):
    """``e_l(xi) = <F_l(xi), xi> - l(xi)``."""
    xi = np.asarray(xi, dtype=float)
    return float(legendre(l, xi) @ xi - l.value(xi))


def inverse_legendre(l, pi, xi0=None, tol=NEWTON_TOL, max_iter=NEWTON_MAX_ITER):
    """Solve ``F_l(xi) = pi`` for ``xi`` by Newton's method."""
    pi = np.asarray(pi, dtype=float)
    if isinstance(l, QuadraticLagrangian):
        return l.solve_hessian(None, pi)
    xi = np.zeros_like(pi) if xi0 is None else np.array(xi0, dtype=float)
    noise = NOISE_TOL * (1.0 + float(np.max(np.abs(pi))))
    prev = np.inf
    for _ in range(max_iter):
        r = legendre(l, xi) - pi
        delta = l.solve_hessian(xi, r)
        xi = xi - delta
        if not np.all(np.isfinite(xi)):
            break
        step = float(np.max(np.abs(delta)))
        if step <= tol * (1.0 + np.max(np.abs(xi))):
            return xi
        # differenced gradients stall at their noise floor
        if step >= 0.5 * prev and np.max(np.abs(r)) <= noise:
            return xi
        prev = step
    raise NewtonDivergence(f"Legendre inversion did not converge for pi={pi}")


class LegendreHamiltonian:
    """``h = e_l o F_l^{-1}`` for a hyperregular custom Lagrangian."""

    def __init__(self, lagrangian):
        self.lagrangian = lagrangian
        self.dim = lagrangian.dim

    def velocity(self, pi):
        return inverse_legendre(self.lagrangian, pi)

    def value(self, pi):
        return energy(self.lagrangian, self.velocity(pi))

    def gradient(self, pi):
        # dh/dpi = F_l^{-1}(pi)
        return self.velocity(pi)

    def hessian(self, pi):
        xi = self.velocity(pi)
        return np.linalg.inv(self.lagrangian.hessian(xi))

    @property
    def has_closed_form_hessian(self):
        return False


def hamiltonian_from_lagrangian(l):
    """Reduced Hamiltonian of a hyperregular reduced Lagrangian."""
    if isinstance(l, QuadraticLagrangian):
        return QuadraticHamiltonian(l.inertia_inv)
    return LegendreHamiltonian(l)
