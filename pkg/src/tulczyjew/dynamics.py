"""Reduced equations of motion and fixed-step integration.

Lie-Poisson on ``g*``, Hamilton-Poincare on ``g* x T*R^n``, Euler-Poincare
on ``g``, and left-trivialized reconstruction ``g' = g omega`` with
``omega = dh(pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import (
    ConfigError,
    DegenerateLagrangian,
    MethodMismatch,
    NewtonDivergence,
    NonFiniteState,
)
from .lie import GroupElement, _as_group, _vec, ad_star, bracket, expm
from .maps import ProductState
from .models import (
    QuadraticHamiltonian,
    QuadraticLagrangian,
    fd_jacobian,
    hamiltonian_from_lagrangian,
    legendre,
)

METHODS = ("rk4", "midpoint")
REORTHONORMALIZE_EVERY = 1000


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    ``dt`` is the largest allowed step; the step actually used is
    ``t_final / ceil(t_final / dt)`` so that samples are uniform and the last
    one lands on ``t_final``.
    """

    method: str = "rk4"
    dt: float = 1e-3
    t_final: float = 10.0
    newton_tol: float = 1e-12
    newton_max_iter: int = 50

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.t_final) and self.t_final > 0):
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if self.dt > self.t_final:
            raise ConfigError(f"dt={self.dt} exceeds t_final={self.t_final}")
        if self.newton_tol <= 0 or self.newton_max_iter < 1:
            raise ConfigError("Newton tolerance and iteration cap must be positive")

    @property
    def nsteps(self):
        return int(np.ceil(self.t_final / self.dt - 1e-9))

    @property
    def step(self):
        return self.t_final / self.nsteps

    def times(self):
        return np.arange(self.nsteps + 1) * self.step


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    labels: list
    diagnostics: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim != 2 or self.states.shape[0] != self.times.shape[0]:
            raise ValueError("states must be (len(times), n)")
        if len(self.labels) != self.states.shape[1]:
            raise ValueError("one label per state column required")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def __len__(self):
        return self.times.size


def _labels(prefix, n):
    return [f"{prefix}{i + 1}" for i in range(n)]


# ---------------------------------------------------------------- right-hand sides


def lie_poisson_rhs(A, h, pi):
    """``pi' = ad*_{dh(pi)} pi``."""
    pi = _vec(A, pi, "covector")
    return ad_star(A, h.gradient(pi), pi)


def lie_poisson_jacobian(A, h, pi):
    """Jacobian of :func:`lie_poisson_rhs` in ``pi``."""
    pi = _vec(A, pi, "covector")
    H = h.hessian(pi)
    omega = h.gradient(pi)
    return np.einsum("ijk,im,k->jm", A.c, H, pi) + np.einsum("ijk,i->jk", A.c, omega)


def hp_product_rhs(A, h, state):
    """Hamilton-Poincare equations on ``g* x T*R^n``.

    ``pi' = ad*_{dh/dpi} pi``, ``x' = dh/dp``, ``p' = -dh/dx``.  Returns the
    tangent as a :class:`ProductState`.
    """
    dpi, dx, dp = h.gradients(state.pi, state.x, state.p)
    return ProductState(ad_star(A, dpi, state.pi), dp, -dx)


def euler_poincare_rhs(A, l, xi):
    """``xi' = Hess_l(xi)^{-1} ad*_xi F_l(xi)``."""
    xi = _vec(A, xi)
    force = ad_star(A, xi, legendre(l, xi))
    try:
        out = l.solve_hessian(xi, force)
    except np.linalg.LinAlgError as exc:
        raise DegenerateLagrangian(f"fiber Hessian is singular at xi={xi}") from exc
    if not np.all(np.isfinite(out)):
        raise DegenerateLagrangian(f"fiber Hessian is singular at xi={xi}")
    return out


# ---------------------------------------------------------------- integrators


def _check_finite(states, start=0):
    bad = ~np.all(np.isfinite(states), axis=1)
    if bad.any():
        idx = int(np.argmax(bad)) + start
        raise NonFiniteState(f"state became non-finite at step {idx}", step=idx)


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _midpoint_step(f, jac, y0, dt, tol, max_iter, step_index):
    n = y0.size
    y1 = y0 + dt * f(y0)
    eye = np.eye(n)
    for _ in range(max_iter):
        mid = 0.5 * (y0 + y1)
        F = y1 - y0 - dt * f(mid)
        J = jac(mid) if jac is not None else fd_jacobian(f, mid)
        try:
            delta = np.linalg.solve(eye - 0.5 * dt * J, -F)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(f"singular Newton matrix at step {step_index}") from exc
        y1 = y1 + delta
        if not np.all(np.isfinite(y1)):
            raise NewtonDivergence(f"Newton iterate became non-finite at step {step_index}")
        if np.max(np.abs(delta)) <= tol * (1.0 + np.max(np.abs(y1))):
            return y1
    raise NewtonDivergence(f"Newton did not converge in {max_iter} iterations at step {step_index}")


def integrate(rhs, y0, cfg, jacobian=None, labels=None):
    """Integrate ``y' = rhs(y)`` with fixed steps and return every sample.

    ``jacobian`` is used by the implicit midpoint Newton solve; without it a
    central-difference Jacobian is formed.
    """
    y = np.array(y0, dtype=float).ravel()
    n, dt = cfg.nsteps, cfg.step
    out = np.empty((n + 1, y.size))
    out[0] = y
    _check_finite(out[:1])
    for k in range(n):
        if cfg.method == "rk4":
            y = _rk4_step(rhs, y, dt)
        else:
            y = _midpoint_step(rhs, jacobian, y, dt, cfg.newton_tol, cfg.newton_max_iter, k + 1)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"state became non-finite at step {k + 1}", step=k + 1)
        out[k + 1] = y
    return Trajectory(
        cfg.times(),
        out,
        labels or _labels("y", y.size),
        meta={"method": cfg.method, "dt": dt},
    )


def _kernel_module(backend):
    return _backend.kernels if backend is None else _backend.get_kernels(backend)


def simulate_lie_poisson(A, h, pi0, cfg, backend=None):
    """Lie-Poisson trajectory with energy and Casimir diagnostics."""
    pi0 = _vec(A, pi0, "covector")
    if cfg.method == "rk4" and isinstance(h, QuadraticHamiltonian):
        K = _kernel_module(backend)
        states = K.rk4_lie_poisson_quadratic(A.c, h.W, h.b, pi0, cfg.step, cfg.nsteps)
        _check_finite(states)
        traj = Trajectory(cfg.times(), states, _labels("pi", A.dim), meta={"method": "rk4", "dt": cfg.step})
    else:
        jac = None
        if isinstance(h, QuadraticHamiltonian) or getattr(h, "has_closed_form_hessian", False):
            jac = lambda p: lie_poisson_jacobian(A, h, p)  # noqa: E731
        traj = integrate(lambda p: lie_poisson_rhs(A, h, p), pi0, cfg, jac, _labels("pi", A.dim))
    traj.meta.update(algebra=A.name, system="lie_poisson")
    traj.diagnostics.update(lie_poisson_diagnostics(A, h, traj.states))
    return traj


def lie_poisson_diagnostics(A, h, states):
    diags = {"energy": np.array([h.value(p) for p in states])}
    if A.name == "so3":
        diags["casimir_so3"] = np.einsum("ij,ij->i", states, states)
    elif A.name == "heisenberg3":
        diags["casimir_heis"] = states[:, 2].copy()
    return diags


def simulate_euler_poincare(A, l, xi0, cfg, backend=None):
    """Euler-Poincare trajectory in ``xi`` with energy ``e_l`` as diagnostic."""
    xi0 = _vec(A, xi0)
    if cfg.method == "rk4" and isinstance(l, QuadraticLagrangian):
        K = _kernel_module(backend)
        states = K.rk4_euler_poincare_quadratic(A.c, l.inertia, l.inertia_inv, xi0, cfg.step, cfg.nsteps)
        _check_finite(states)
        traj = Trajectory(cfg.times(), states, _labels("xi", A.dim), meta={"method": "rk4", "dt": cfg.step})
    else:
        traj = integrate(lambda x: euler_poincare_rhs(A, l, x), xi0, cfg, None, _labels("xi", A.dim))
    traj.meta.update(algebra=A.name, system="euler_poincare")
    traj.diagnostics["energy"] = np.array([legendre(l, x) @ x - l.value(x) for x in traj.states])
    return traj


def simulate_product(A, h, state0, cfg):
    """Hamilton-Poincare trajectory on ``g* x T*R^n``; columns ``pi.., x.., p..``."""
    d, n = A.dim, state0.x.size
    _vec(A, state0.pi, "covector")

    def f(y):
        t = hp_product_rhs(A, h, ProductState(y[:d], y[d : d + n], y[d + n :]))
        return t.as_array()

    labels = _labels("pi", d) + _labels("x", n) + _labels("p", n)
    traj = integrate(f, state0.as_array(), cfg, None, labels)
    traj.meta.update(algebra=A.name, system="product", base_dim=n)
    traj.diagnostics["energy"] = np.array(
        [h.value(y[:d], y[d : d + n], y[d + n :]) for y in traj.states]
    )
    return traj


# ---------------------------------------------------------------- reconstruction


@dataclass
class GroupTrajectory:
    times: np.ndarray
    adjoints: np.ndarray
    spatial_momentum: np.ndarray

    def element(self, k):
        return GroupElement(ad=self.adjoints[k], ad_inv=np.linalg.inv(self.adjoints[k]))


def _dexpinv_right(A, u, v):
    # u' for g = g_n exp(u), g' = g v: dexp^{-1}_{-u} v = v + [u,v]/2 + [u,[u,v]]/12 + O(u^4)
    uv = bracket(A, u, v)
    return v + 0.5 * uv + bracket(A, u, uv) / 12.0


def _polar(R):
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        U[:, -1] = -U[:, -1]
        Q = U @ Vt
    return Q


def reorthonormalize(A, ad):
    """Project the rotation blocks of an so3/se3 adjoint matrix back onto the group."""
    if A.name == "so3":
        return _polar(ad)
    if A.name == "se3":
        R = _polar(0.5 * (ad[:3, :3] + ad[3:, 3:]))
        T = ad[3:, :3] @ R.T
        T = 0.5 * (T - T.T)
        out = np.zeros((6, 6))
        out[:3, :3] = R
        out[3:, 3:] = R
        out[3:, :3] = T @ R
        return out
    return ad


def reconstruct(A, traj, h, g0=None, method=None):
    """Rebuild ``g(t)`` from a Lie-Poisson trajectory by solving ``g' = g dh(pi)``.

    RK4 trajectories use a fourth-order Runge-Kutta-Munthe-Kaas step whose
    internal ``pi`` stages are the classical RK4 stages; midpoint trajectories
    use ``exp(dt dh(pi_mid))``.  Either way ``Ad_g`` is advanced by right
    multiplication with ``Ad_{exp(u)}``.  The spatial momentum
    ``Ad*_{g^{-1}} pi`` is returned alongside.
    """
    traj_method = traj.meta.get("method")
    if traj_method not in METHODS:
        raise MethodMismatch(f"trajectory does not record a supported method ({traj_method!r})")
    if method is not None and method != traj_method:
        raise MethodMismatch(f"trajectory was integrated with {traj_method}, not {method}")
    if traj.meta.get("system", "lie_poisson") != "lie_poisson":
        raise MethodMismatch("reconstruction needs a Lie-Poisson trajectory")
    g = GroupElement.identity(A.dim) if g0 is None else _as_group(A, g0)
    dt = traj.dt
    states = traj.states
    N = states.shape[0]
    ads = np.empty((N, A.dim, A.dim))
    J = np.empty((N, A.dim))
    ad = np.array(g.ad, dtype=float)
    ads[0] = ad
    J[0] = np.linalg.solve(ad.T, states[0])

    def f(p):
        return ad_star(A, h.gradient(p), p)

    for n in range(N - 1):
        pi = states[n]
        if traj_method == "rk4":
            w1 = h.gradient(pi)
            k1 = ad_star(A, w1, pi)
            K1 = dt * w1
            p2 = pi + 0.5 * dt * k1
            w2 = h.gradient(p2)
            k2 = ad_star(A, w2, p2)
            K2 = dt * _dexpinv_right(A, 0.5 * K1, w2)
            p3 = pi + 0.5 * dt * k2
            w3 = h.gradient(p3)
            k3 = ad_star(A, w3, p3)
            K3 = dt * _dexpinv_right(A, 0.5 * K2, w3)
            p4 = pi + dt * k3
            K4 = dt * _dexpinv_right(A, K3, h.gradient(p4))
            u = (K1 + 2.0 * K2 + 2.0 * K3 + K4) / 6.0
        else:
            u = dt * h.gradient(0.5 * (pi + states[n + 1]))
        ad = ad @ expm(A.ad(u))
        if (n + 1) % REORTHONORMALIZE_EVERY == 0:
            ad = reorthonormalize(A, ad)
        ads[n + 1] = ad
        J[n + 1] = np.linalg.solve(ad.T, states[n + 1])
    if not np.all(np.isfinite(ads)):
        raise NonFiniteState("reconstructed group trajectory is not finite")
    return GroupTrajectory(traj.times.copy(), ads, J)


def equivalence_run(A, l, xi0, cfg, backend=None):
    """Integrate Euler-Poincare from ``xi0`` and Lie-Poisson from ``F_l(xi0)``.

    Returns ``(ep_traj, lp_traj, max_deviation)`` where the deviation is
    ``max_t ||F_l(xi(t)) - pi(t)||``.
    """
    h = hamiltonian_from_lagrangian(l)
    ep = simulate_euler_poincare(A, l, xi0, cfg, backend)
    lp = simulate_lie_poisson(A, h, legendre(l, _vec(A, xi0)), cfg, backend)
    mapped = np.array([legendre(l, x) for x in ep.states])
    dev = float(np.max(np.linalg.norm(mapped - lp.states, axis=1)))
    return ep, lp, dev
