"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` one-for-one and are used whenever the compiled
extension is unavailable (or ``TULCZYJEW_PURE_PYTHON=1`` is set).

Structure constants are stored as ``c[i, j, k] = c^k_{ij}`` so that
``[e_i, e_j] = sum_k c[i, j, k] e_k``.
"""

import numpy as np

EXPM_TERM_RTOL = 1e-16
EXPM_MAX_TERMS = 60


def bracket(c, x, y):
    return np.einsum("ijk,i,j->k", c, x, y)


def ad_star(c, omega, pi):
    return np.einsum("ijk,i,k->j", c, omega, pi)


def ad_matrix(c, xi):
    # (ad_xi)_{kj} = sum_i c^k_{ij} xi_i
    return np.einsum("ijk,i->kj", c, xi)


def _norm1(a):
    return np.abs(a).sum(axis=0).max()


def expm(a):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    norm = _norm1(a) if n else 0.0
    s = 0
    if norm > 0.5:
        s = int(np.ceil(np.log2(norm / 0.5)))
    x = a / (2.0**s)
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, EXPM_MAX_TERMS):
        term = term @ x / k
        result = result + term
        if _norm1(term) <= EXPM_TERM_RTOL * _norm1(result):
            break
    for _ in range(s):
        result = result @ result
    return result


def rk4_lie_poisson_quadratic(c, W, b, pi0, dt, nsteps):
    """RK4 for pi' = ad*_{W pi + b} pi, all samples returned."""
    out = np.empty((nsteps + 1, pi0.shape[0]))
    pi = np.array(pi0, dtype=float)
    out[0] = pi

    def f(p):
        return np.einsum("ijk,i,k->j", c, W @ p + b, p)

    half = 0.5 * dt
    for n in range(nsteps):
        k1 = f(pi)
        k2 = f(pi + half * k1)
        k3 = f(pi + half * k2)
        k4 = f(pi + dt * k3)
        pi = pi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n + 1] = pi
    return out


def rk4_euler_poincare_quadratic(c, inertia, inertia_inv, xi0, dt, nsteps):
    """RK4 for xi' = I^{-1} ad*_xi (I xi), all samples returned."""
    out = np.empty((nsteps + 1, xi0.shape[0]))
    xi = np.array(xi0, dtype=float)
    out[0] = xi

    def f(x):
        return inertia_inv @ np.einsum("ijk,i,k->j", c, x, inertia @ x)

    half = 0.5 * dt
    for n in range(nsteps):
        k1 = f(xi)
        k2 = f(xi + half * k1)
        k3 = f(xi + half * k2)
        k4 = f(xi + dt * k3)
        xi = xi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n + 1] = xi
    return out
