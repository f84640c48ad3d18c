"""Executable residual checks for the reduced triple.

Every check returns a :class:`CheckReport`.  Sampling is driven by a seeded
``numpy.random.Generator`` (PCG64, default seed 42) so reports are
reproducible.  Tolerances are module constants; passing ``tolerance=``
overrides one and logs a warning.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig, Trajectory, simulate_euler_poincare, simulate_lie_poisson
from .errors import (
    DimensionMismatch,
    InsufficientData,
    SingularMass,
    TooFewSamples,
    UnknownQuantity,
)
from .lie import GroupElement, ad_star, bracket, builtin_algebra, jacobi_residual, pair
from .maps import (
    COTT,
    TTCOT,
    GrpTstarTstar,
    ReducedPoint,
    VSPoint4,
    grp_flat,
    grp_point,
    left_translate,
    momentum_TstarTstarG,
    momentum_TTstarG,
    psi0_inv,
    r_pairing_residual,
    reduced_flat0_inv,
    sharp,
    vs_flat,
    vs_R,
    vs_tulczyjew_A,
    xi,
)
from .models import CustomHamiltonian, QuadraticHamiltonian, QuadraticLagrangian, legendre

log = logging.getLogger(__name__)

DEFAULT_SEED = 42
DEFAULT_SAMPLES = 1000

TOL_JACOBI = 1e-12
TOL_DUALITY = 1e-13
TOL_MOMENTUM = 1e-12
TOL_EXACT = 1e-13
TOL_VS_TRIPLE = 1e-12
TOL_ISOTROPY_CLOSED = 1e-12
TOL_ISOTROPY_FD = 1e-10
TOL_DRIFT = 1e-8

DRIFT_QUANTITIES = ("energy", "casimir_so3", "casimir_heis", "spatial_momentum")


@dataclass
class CheckReport:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    worst_case: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.max_residual <= self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "samples": self.samples,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
            "worst_case": _jsonable(self.worst_case),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], int(d["samples"]), float(d["max_residual"]), float(d["tolerance"]), d.get("worst_case", {}))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _tol(default, override, name):
    if override is None:
        return default
    log.warning("check %s: tolerance overridden %.3g -> %.3g", name, default, override)
    return float(override)


def _rng(seed):
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


class _Worst:
    def __init__(self):
        self.value = 0.0
        self.case = {}

    def update(self, residual, **case):
        residual = float(residual)
        if math.isnan(self.value):
            return
        if not self.case or residual > self.value or math.isnan(residual):
            self.value = residual
            self.case = case


def random_group_point(A, rng, scale=1.0):
    g = GroupElement.exp(A, rng.normal(scale=scale, size=A.dim))
    return grp_point(A, g, rng.normal(size=A.dim), rng.normal(size=A.dim), rng.normal(size=A.dim))


# ---------------------------------------------------------------- algebra


def check_jacobi(A, tolerance=None):
    tol = _tol(TOL_JACOBI, tolerance, "jacobi")
    return CheckReport(f"jacobi[{A.name}]", 1, jacobi_residual(A), tol)


def check_ad_star_duality(A, samples=DEFAULT_SAMPLES, seed=None, tolerance=None):
    """``<ad*_omega pi, eta> - <pi, [omega, eta]>`` over random triples."""
    tol = _tol(TOL_DUALITY, tolerance, "ad_star_duality")
    rng = _rng(seed)
    worst = _Worst()
    for s in range(samples):
        omega, pi, eta = rng.normal(size=(3, A.dim))
        r = abs(pair(ad_star(A, omega, pi), eta) - pair(pi, bracket(A, omega, eta)))
        worst.update(r, sample=s, omega=omega, pi=pi, eta=eta)
    return CheckReport(f"ad_star_duality[{A.name}]", samples, worst.value, tol, worst.case)


# ---------------------------------------------------------------- maps


def check_momentum_flat_relation(A, samples=DEFAULT_SAMPLES, seed=None, points=None, tolerance=None):
    """``J_{T*T*G}(b(pt)) + J_{TT*G}(pt) = 0`` at random trivialized points."""
    tol = _tol(TOL_MOMENTUM, tolerance, "momentum_flat_relation")
    rng = _rng(seed)
    pts = points if points is not None else [random_group_point(A, rng) for _ in range(samples)]
    worst = _Worst()
    for s, pt in enumerate(pts):
        r = momentum_TstarTstarG(A, grp_flat(A, pt)) + momentum_TTstarG(A, pt)
        worst.update(np.max(np.abs(r)), sample=s, pi=pt.pi, omega=pt.omega, pidot=pt.pidot)
    return CheckReport(f"momentum_flat_relation[{A.name}]", len(pts), worst.value, tol, worst.case)


def check_zero_level(A, samples=DEFAULT_SAMPLES, seed=None, tolerance=None):
    """Points with ``pidot = ad*_omega pi`` have zero ``J_{TT*G}``."""
    tol = _tol(TOL_EXACT, tolerance, "zero_level")
    rng = _rng(seed)
    worst = _Worst()
    for s in range(samples):
        pt = random_group_point(A, rng)
        on = grp_point(A, pt.g, pt.pi, pt.omega, ad_star(A, pt.omega, pt.pi))
        r = np.max(np.abs(momentum_TTstarG(A, on)))
        worst.update(r, sample=s, pi=pt.pi, omega=pt.omega)
    return CheckReport(f"zero_level[{A.name}]", samples, worst.value, tol, worst.case)


def check_flat_equivariance(A, samples=DEFAULT_SAMPLES, seed=None, tolerance=None):
    """Left translation commutes with the trivialized flat map."""
    tol = _tol(TOL_EXACT, tolerance, "flat_equivariance")
    rng = _rng(seed)
    worst = _Worst()
    for s in range(samples):
        pt = random_group_point(A, rng)
        g0 = GroupElement.exp(A, rng.normal(size=A.dim))
        a = grp_flat(A, left_translate(g0, pt))
        b = left_translate(g0, grp_flat(A, pt))
        r = max(
            np.max(np.abs(a.g.ad - b.g.ad)),
            np.max(np.abs(a.pi - b.pi)),
            np.max(np.abs(a.pitilde - b.pitilde)),
            np.max(np.abs(a.omega - b.omega)),
        )
        worst.update(r, sample=s)
    return CheckReport(f"flat_equivariance[{A.name}]", samples, worst.value, tol, worst.case)


def _ad_star_by_pairing(A, omega, pi):
    # (ad*_omega pi)_j = <pi, [omega, e_j]>, evaluated basis vector by basis vector
    basis = np.eye(A.dim)
    return np.array([pair(pi, bracket(A, omega, e)) for e in basis])


def check_sharp_commutation(A, samples=DEFAULT_SAMPLES, seed=None, tolerance=None):
    """``sharp`` against ``Xi o [b_0]^{-1} o Psi_0^{-1}`` and against the pairing oracle."""
    tol = _tol(TOL_EXACT, tolerance, "sharp_commutation")
    rng = _rng(seed)
    worst = _Worst()
    for s in range(samples):
        pi, dphi = rng.normal(size=(2, A.dim))
        p1, v1 = sharp(A, pi, dphi)
        p2, v2 = xi(A, reduced_flat0_inv(psi0_inv(ReducedPoint(pi, dphi))))
        oracle = _ad_star_by_pairing(A, dphi, pi)
        r = max(
            np.max(np.abs(p1 - p2)),
            np.max(np.abs(v1 - v2)),
            np.max(np.abs(p1 - pi)),
            np.max(np.abs(v1 - oracle)),
        )
        worst.update(r, sample=s, pi=pi, dphi=dphi)
    return CheckReport(f"sharp_commutation[{A.name}]", samples, worst.value, tol, worst.case)


def check_invariant_graph_zero_level(A, h, samples=DEFAULT_SAMPLES, seed=None, pi_prime=None, tolerance=None):
    """Trivialized ``dH`` points ``((g, pi), (pi', dh(pi)))`` with ``pi' = 0`` lie in ``J^{-1}(0)``.

    ``pi_prime`` replaces the zero slot (negative control).
    """
    tol = _tol(TOL_EXACT, tolerance, "invariant_graph_zero_level")
    rng = _rng(seed)
    offset = np.zeros(A.dim) if pi_prime is None else np.asarray(pi_prime, dtype=float)
    worst = _Worst()
    for s in range(samples):
        g = GroupElement.exp(A, rng.normal(size=A.dim))
        pi = rng.normal(size=A.dim)
        pt = GrpTstarTstar(g, pi, offset, h.gradient(pi))
        r = np.linalg.norm(momentum_TstarTstarG(A, pt))
        worst.update(r, sample=s, pi=pi)
    return CheckReport(f"invariant_graph_zero_level[{A.name}]", samples, worst.value, tol, worst.case)


def check_graph_isotropy(h, samples=DEFAULT_SAMPLES, seed=None, directions=None, tolerance=None):
    """Isotropy of ``S_h = graph(dh)`` in ``g* x g`` under the canonical form.

    Tangent vectors at ``pi`` are ``(dpi, H dpi)``; the residual is
    ``|<H dpi2, dpi1> - <H dpi1, dpi2>|``.  ``directions`` may supply explicit
    ``(pi, dpi1, dpi2)`` triples.
    """
    closed = isinstance(h, QuadraticHamiltonian) or getattr(h, "has_closed_form_hessian", False)
    tol = _tol(TOL_ISOTROPY_CLOSED if closed else TOL_ISOTROPY_FD, tolerance, "graph_isotropy")
    rng = _rng(seed)
    if directions is None:
        directions = [tuple(rng.normal(size=(3, h.dim))) for _ in range(samples)]
    worst = _Worst()
    for s, (pi, d1, d2) in enumerate(directions):
        H = h.hessian(pi)
        r = abs(pair(d1, H @ d2) - pair(d2, H @ d1))
        worst.update(r, sample=s, pi=pi)
    name = "graph_isotropy[" + ("closed" if closed else "fd") + "]"
    return CheckReport(name, len(directions), worst.value, tol, worst.case)


# ---------------------------------------------------------------- vector-space triple


def vs_triple_residual(pt, M, K, k):
    """Membership residual of a ``TT*Q`` point in ``S_L`` and ``S_H``.

    ``L = 1/2 qdot^T M qdot - V(q)``, ``V = 1/2 q^T K q + <k, q>``.
    Returns ``(res_L, res_H)``: slot mismatch of ``A_Q(pt)`` against
    ``dL(q, qdot)`` and of ``flat(pt)`` against ``dH(q, p)``.
    """
    Minv = np.linalg.inv(M)
    a = vs_tulczyjew_A(pt)
    q, v = a.q, a.p
    dLdq = -(K @ q + k)
    dLdv = M @ v
    res_L = max(np.max(np.abs(a.qdot - dLdq)), np.max(np.abs(a.pdot - dLdv)))
    f = vs_flat(pt)
    dHdq = K @ f.q + k
    dHdp = Minv @ f.p
    res_H = max(np.max(np.abs(f.qdot - dHdq)), np.max(np.abs(f.pdot - dHdp)))
    return float(res_L), float(res_H)


def check_vs_triple(M, K=None, k=None, samples=DEFAULT_SAMPLES, seed=None, points=None, tolerance=None):
    """``S_L`` and ``S_H`` coincide for a quadratic mechanical Lagrangian on ``R^n``.

    Points ``(q, M qdot, qdot, dL/dq)`` are checked against ``dL(TQ)`` via
    ``A_Q`` and against ``dH(T*Q)`` via the flat map.  Also checks the slot
    identity ``R o A_Q = flat`` exactly.
    """
    tol = _tol(TOL_VS_TRIPLE, tolerance, "vs_triple")
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[0]
    K = np.zeros((n, n)) if K is None else np.atleast_2d(np.asarray(K, dtype=float))
    k = np.zeros(n) if k is None else np.atleast_1d(np.asarray(k, dtype=float))
    if M.shape != (n, n) or K.shape != (n, n) or k.shape != (n,):
        raise DimensionMismatch("M, K and k must agree in dimension")
    if np.linalg.cond(M) > 1e12:
        raise SingularMass("mass matrix is singular")
    rng = _rng(seed)
    if points is None:
        points = []
        for _ in range(samples):
            q, qd = rng.normal(size=(2, n))
            points.append(VSPoint4(q, M @ qd, qd, -(K @ q + k), TTCOT))
    worst = _Worst()
    for s, pt in enumerate(points):
        rL, rH = vs_triple_residual(pt, M, K, k)
        perm = 0.0 if vs_R(vs_tulczyjew_A(pt)).equals(vs_flat(pt)) else np.inf
        worst.update(max(rL, rH, perm), sample=s, point=pt.as_array(), res_L=rL, res_H=rH)
    return CheckReport(f"vs_triple[n={n}]", len(points), worst.value, tol, worst.case)


def check_R_pairing(n, samples=DEFAULT_SAMPLES, seed=None, tolerance=None):
    """Defining pairing identity of ``R`` at random compatible ``(W, Wbar)``."""
    tol = _tol(TOL_EXACT, tolerance, "R_pairing")
    rng = _rng(seed)
    worst = _Worst()
    for s in range(samples):
        q, v, a, b, dq, dp, dv = rng.normal(size=(7, n))
        alpha = VSPoint4(q, v, a, b, COTT)
        r = abs(r_pairing_residual(alpha, (q, b, dq, dp), (q, v, dq, dv)))
        worst.update(r, sample=s)
    return CheckReport(f"R_pairing[n={n}]", samples, worst.value, tol, worst.case)


# ---------------------------------------------------------------- trajectories


def _interior_fd(traj):
    """Central-difference velocities at interior samples.

    Five-point stencil (fourth order) when there are at least 5 samples,
    otherwise the three-point stencil.  Returns ``(fd, dt, interior_slice)``.
    """
    N = len(traj)
    if N < 3:
        raise TooFewSamples(f"need at least 3 samples, got {N}")
    y, dt = traj.states, traj.dt
    if N >= 5:
        fd = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * dt)
        return fd, dt, slice(2, N - 2)
    return (y[2:] - y[:-2]) / (2.0 * dt), dt, slice(1, N - 1)


def _lift_report(name, traj, fd, model_rates, dt, inner, tolerance):
    tol = _tol(max(10.0 * dt * dt, 1e-9), tolerance, name)
    err = np.max(np.abs(fd - model_rates), axis=1)
    k = int(np.argmax(err))
    idx = inner.start + k
    case = {"sample": idx, "t": float(traj.times[idx]), "state": traj.states[idx]}
    return CheckReport(name, int(err.size), float(err[k]), tol, case)


def check_tangent_lift(A, traj, h, tolerance=None):
    """``Xi`` of the ``S_h`` curve is the tangent lift of the trajectory.

    Builds ``(pi_k, dh(pi_k))``, applies ``Xi`` and compares the velocity slot
    with central differences of the samples at interior points.  Product
    trajectories (``pi, x, p`` columns) also compare ``(x', p')`` with the
    Hamiltonian vector field on ``T*R^n``.
    """
    fd, dt, inner = _interior_fd(traj)
    d = A.dim
    rates = np.empty_like(fd)
    if traj.meta.get("system") == "product":
        n = int(traj.meta["base_dim"])
        for k, y in enumerate(traj.states[inner]):
            pi, x, p = y[:d], y[d : d + n], y[d + n :]
            dpi, dx, dp = h.gradients(pi, x, p)
            _, v = xi(A, ReducedPoint(pi, dpi))
            rates[k] = np.concatenate([v, dp, -dx])
    else:
        for k, pi in enumerate(traj.states[inner]):
            _, rates[k] = xi(A, ReducedPoint(pi, h.gradient(pi)))
    return _lift_report(f"tangent_lift[{A.name}]", traj, fd, rates, dt, inner, tolerance)


def check_tangent_lift_lagrangian(A, traj, l, tolerance=None):
    """``Xi(F_l(xi), xi)`` is the tangent lift of ``F_l o xi`` for an Euler-Poincare trajectory."""
    mapped = np.array([legendre(l, x) for x in traj.states])
    image = Trajectory(traj.times, mapped, [f"pi{i + 1}" for i in range(A.dim)], meta=dict(traj.meta))
    fd, dt, inner = _interior_fd(image)
    rates = np.array([xi(A, ReducedPoint(p, x))[1] for p, x in zip(mapped[inner], traj.states[inner])])
    return _lift_report(f"tangent_lift_lagrangian[{A.name}]", traj, fd, rates, dt, inner, tolerance)


def drift_report(traj, quantities, group=None, tolerance=None):
    """``max_t |Q(t) - Q(0)|`` for each requested quantity.

    ``spatial_momentum`` needs the :class:`~tulczyjew.dynamics.GroupTrajectory`
    returned by ``reconstruct`` (passed as ``group``).
    """
    tol = _tol(TOL_DRIFT, tolerance, "drift")
    reports = []
    for q in quantities:
        if q not in DRIFT_QUANTITIES:
            raise UnknownQuantity(f"unknown quantity {q!r}; choose from {DRIFT_QUANTITIES}")
        if q == "energy":
            series = np.asarray(traj.diagnostics["energy"])
        elif q == "casimir_so3":
            series = np.einsum("ij,ij->i", traj.states[:, :3], traj.states[:, :3])
        elif q == "casimir_heis":
            series = traj.states[:, 2]
        else:
            if group is None:
                raise ValueError("spatial_momentum drift needs the reconstructed group trajectory")
            series = group.spatial_momentum
        dev = np.abs(series - series[0])
        if dev.ndim > 1:
            dev = np.max(dev, axis=1)
        k = int(np.argmax(dev))
        reports.append(CheckReport(f"drift[{q}]", len(dev), float(dev[k]), tol, {"sample": k, "t": float(traj.times[k])}))
    return reports


# ---------------------------------------------------------------- convergence


@dataclass
class AxisymmetricTop:
    """Free rigid body with ``I = diag(I1, I1, I3)``; closed-form Lie-Poisson flow.

    ``pi3`` is constant and ``(pi1, pi2)`` rotates at rate
    ``lam = pi3 (1/I3 - 1/I1)``.
    """

    I1: float = 1.0
    I3: float = 3.0
    pi0: tuple = (1.0, 0.0, 1.0)
    t_final: float | None = None

    @property
    def rate(self):
        return self.pi0[2] * (1.0 / self.I3 - 1.0 / self.I1)

    @property
    def period(self):
        return 2.0 * math.pi / abs(self.rate)

    def exact(self, t):
        a, b, c = self.pi0
        lt = self.rate * t
        return np.array([a * math.cos(lt) + b * math.sin(lt), -a * math.sin(lt) + b * math.cos(lt), c])

    def hamiltonian(self):
        return QuadraticHamiltonian(np.diag([1.0 / self.I1, 1.0 / self.I1, 1.0 / self.I3]))

    def final_error(self, A, dt, method="rk4"):
        T = self.period if self.t_final is None else self.t_final
        cfg = IntegratorConfig(method, dt, T)
        traj = simulate_lie_poisson(A, self.hamiltonian(), self.pi0, cfg)
        return cfg.step, float(np.max(np.abs(traj.states[-1] - self.exact(T))))


@dataclass
class ConvergenceResult:
    order: float
    dts: list
    errors: list
    exact: bool = False


def convergence_order(problem, dts, method="rk4", A=None):
    """Least-squares slope of ``log(error)`` against ``log(dt)``.

    When every error is zero the slope is undefined: ``order`` is NaN and
    ``exact`` is set.
    """
    if len(dts) < 3:
        raise InsufficientData(f"need at least 3 step sizes, got {len(dts)}")
    if A is None:
        A = builtin_algebra("so3")
    steps, errors = zip(*(problem.final_error(A, dt, method) for dt in dts))
    errors = np.array(errors)
    if np.all(errors == 0.0):
        return ConvergenceResult(float("nan"), list(steps), errors.tolist(), exact=True)
    if np.any(errors <= 0.0):
        raise InsufficientData("some errors are exactly zero; cannot fit a slope")
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    return ConvergenceResult(float(slope), list(steps), errors.tolist())


# ---------------------------------------------------------------- batch


def run_all_checks(A, seed=DEFAULT_SEED, samples=DEFAULT_SAMPLES, dt=1e-3, t_final=1.0):
    """All structural checks for one algebra, ordered by name."""
    inertia = np.arange(1.0, A.dim + 1.0)
    l = QuadraticLagrangian(inertia)
    hq = QuadraticHamiltonian(np.diag(1.0 / inertia))
    hc = CustomHamiltonian(lambda p: 0.5 * p @ p + 0.25 * p[0] ** 2 * p[-1] ** 2, A.dim)
    reports = [
        check_jacobi(A),
        check_ad_star_duality(A, samples, seed),
        check_momentum_flat_relation(A, samples, seed),
        check_zero_level(A, samples, seed),
        check_flat_equivariance(A, samples, seed),
        check_sharp_commutation(A, samples, seed),
        check_invariant_graph_zero_level(A, hq, samples, seed),
        check_graph_isotropy(hq, samples, seed),
        check_graph_isotropy(hc, min(samples, 200), seed),
        check_R_pairing(A.dim, samples, seed),
        check_vs_triple(np.diag(inertia), np.eye(A.dim), np.zeros(A.dim), samples, seed),
    ]
    cfg = IntegratorConfig("rk4", dt, t_final)
    traj = simulate_lie_poisson(A, hq, np.ones(A.dim), cfg)
    reports.append(check_tangent_lift(A, traj, hq))
    ep = simulate_euler_poincare(A, l, np.ones(A.dim), cfg)
    reports.append(check_tangent_lift_lagrangian(A, ep, l))
    reports.extend(drift_report(traj, ["energy"]))
    return sorted(reports, key=lambda r: r.name)


def format_table(reports):
    rows = [("check", "samples", "max_residual", "tolerance", "result")]
    for r in reports:
        rows.append((r.name, str(r.samples), f"{r.max_residual:.3e}", f"{r.tolerance:.1e}", "PASS" if r.passed else "FAIL"))
    widths = [max(len(row[i]) for row in rows) for i in range(5)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows)
