"""Acceptance criteria, one test and one PASS/FAIL line per criterion.

Tolerances are pinned; runtimes are wall-clock for the whole criterion.
Run with ``pytest tests/test_acceptance.py -v``; the summary lines appear
in the "acceptance criteria" section at the end of the session.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from tulczyjew.dynamics import (
    IntegratorConfig,
    Trajectory,
    equivalence_run,
    hp_product_rhs,
    lie_poisson_rhs,
    reconstruct,
    simulate_euler_poincare,
    simulate_lie_poisson,
    simulate_product,
)
from tulczyjew.lie import builtin_algebra
from tulczyjew.maps import TTCOT, ProductState, VSPoint4, vs_flat, vs_R, vs_tulczyjew_A
from tulczyjew.models import (
    CustomHamiltonian,
    CustomProductHamiltonian,
    QuadraticHamiltonian,
    QuadraticLagrangian,
    QuadraticProductHamiltonian,
    fd_gradient,
)
from tulczyjew.verification import (
    AxisymmetricTop,
    check_ad_star_duality,
    check_graph_isotropy,
    check_invariant_graph_zero_level,
    check_jacobi,
    check_momentum_flat_relation,
    check_sharp_commutation,
    check_tangent_lift,
    check_tangent_lift_lagrangian,
    check_vs_triple,
    convergence_order,
    drift_report,
)

BUILTINS = ["so3", "se3", "sl2", "heisenberg3", "abelian(4)"]
SEED = 42
N = 1000


def record(number, title, ok, detail, seconds):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail} ({seconds:.2f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_algebra_validity():
    t0 = time.perf_counter()
    jac = max(check_jacobi(builtin_algebra(a)).max_residual for a in BUILTINS)
    dual = max(check_ad_star_duality(builtin_algebra(a), N, SEED).max_residual for a in BUILTINS)
    dt = time.perf_counter() - t0
    ok = jac < 1e-12 and dual < 1e-13 and dt < 1.0
    record(1, "algebra validity", ok, f"jacobi {jac:.1e} < 1e-12, ad* duality {dual:.1e} < 1e-13", dt)


def test_02_momentum_flat_relation():
    worst, slowest = 0.0, 0.0
    t0 = time.perf_counter()
    for a in BUILTINS:
        t1 = time.perf_counter()
        worst = max(worst, check_momentum_flat_relation(builtin_algebra(a), N, SEED).max_residual)
        slowest = max(slowest, time.perf_counter() - t1)
    ok = worst < 1e-12 and slowest < 1.0
    record(2, "momentum relation J_TM = -J_T*M o flat", ok, f"max {worst:.1e} < 1e-12; slowest algebra {slowest:.2f} s < 1 s", time.perf_counter() - t0)


def test_03_sharp_commutation():
    t0 = time.perf_counter()
    r = max(check_sharp_commutation(builtin_algebra(a), N, SEED).max_residual for a in BUILTINS)
    record(3, "reduced triple commutes (sharp)", r <= 1e-13, f"max {r:.1e} <= 1e-13", time.perf_counter() - t0)


def test_04_vector_space_triple():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    exact = True
    worst = 0.0
    for n in (1, 2, 5):
        for _ in range(N):
            pt = VSPoint4(*rng.normal(size=(4, n)), TTCOT)
            exact &= vs_R(vs_tulczyjew_A(pt)).equals(vs_flat(pt))
        M = np.diag(np.arange(1.0, n + 1))
        K = np.eye(n) * 0.5
        k = np.linspace(-1, 1, n)
        worst = max(worst, check_vs_triple(M, K, k, N, SEED).max_residual)
    ok = bool(exact) and worst < 1e-12
    record(4, "vector-space triple", ok, f"R o A == flat bitwise: {bool(exact)}; S_L/S_H residual {worst:.1e} < 1e-12", time.perf_counter() - t0)


def test_05_lie_poisson_oracle():
    t0 = time.perf_counter()
    so3 = builtin_algebra("so3")
    inertia = np.array([1.0, 2.0, 3.0])
    h = QuadraticHamiltonian(np.diag(1.0 / inertia))
    rng = np.random.default_rng(SEED)
    rhs_err = max(
        np.max(np.abs(lie_poisson_rhs(so3, h, p) - np.cross(p, p / inertia))) for p in rng.normal(size=(N, 3))
    )
    top = AxisymmetricTop(I1=1.0, I3=3.0, pi0=(1.0, 0.0, 1.0))
    traj = simulate_lie_poisson(so3, top.hamiltonian(), top.pi0, IntegratorConfig("rk4", 1e-3, top.period))
    ret = float(np.max(np.abs(traj.states[-1] - np.array(top.pi0))))
    dt = time.perf_counter() - t0
    ok = rhs_err < 1e-13 and ret < 1e-6 and dt < 5.0
    record(5, "Lie-Poisson oracle", ok, f"rhs vs pi x I^-1 pi {rhs_err:.1e} < 1e-13; return after period {ret:.1e} < 1e-6", dt)


def test_06_conservation():
    t0 = time.perf_counter()
    so3 = builtin_algebra("so3")
    h = QuadraticHamiltonian(np.diag([1.0, 0.5, 1.0 / 3.0]))
    pi0 = [1.0, 0.5, -0.3]
    rk = simulate_lie_poisson(so3, h, pi0, IntegratorConfig("rk4", 1e-3, 10.0))
    group = reconstruct(so3, rk, h)
    energy, spatial = drift_report(rk, ["energy", "spatial_momentum"], group)
    mp = simulate_lie_poisson(so3, h, pi0, IntegratorConfig("midpoint", 1e-3, 10.0))
    (casimir,) = drift_report(mp, ["casimir_so3"])
    heis = builtin_algebra("heisenberg3")
    ht = simulate_lie_poisson(heis, QuadraticHamiltonian(np.diag([1.0, 0.5, 1.0 / 3.0])), [0.3, -0.2, 0.7], IntegratorConfig("rk4", 1e-3, 10.0))
    center_exact = bool(np.all(ht.states[:, 2] == ht.states[0, 2]))
    ok = energy.max_residual < 1e-8 and casimir.max_residual < 1e-8 and center_exact and spatial.max_residual < 1e-8
    detail = (
        f"energy {energy.max_residual:.1e}, midpoint |pi|^2 {casimir.max_residual:.1e}, "
        f"spatial momentum {spatial.max_residual:.1e} (all < 1e-8); heisenberg pi3 exact: {center_exact}"
    )
    record(6, "conservation", ok, detail, time.perf_counter() - t0)


def test_07_equivalence():
    t0 = time.perf_counter()
    devs = {}
    for name in ("so3", "se3", "heisenberg3"):
        A = builtin_algebra(name)
        l = QuadraticLagrangian(np.arange(1.0, A.dim + 1))
        _, _, devs[name] = equivalence_run(A, l, np.ones(A.dim), IntegratorConfig("rk4", 1e-3, 10.0))
    dt = time.perf_counter() - t0
    worst = max(devs.values())
    ok = worst < 1e-8 and dt < 10.0
    record(7, "Euler-Poincare == Lie-Poisson via F_l", ok, ", ".join(f"{k} {v:.1e}" for k, v in devs.items()) + " (< 1e-8)", dt)


def test_08_tangent_lift():
    t0 = time.perf_counter()
    cfg = IntegratorConfig("rk4", 1e-3, 1.0)
    mid = IntegratorConfig("midpoint", 1e-3, 1.0)
    worst, controls_fail = 0.0, True
    for name in BUILTINS:
        A = builtin_algebra(name)
        inertia = np.arange(1.0, A.dim + 1)
        h = QuadraticHamiltonian(np.diag(1.0 / inertia))
        l = QuadraticLagrangian(inertia)
        lp = simulate_lie_poisson(A, h, np.linspace(0.5, 1.2, A.dim), cfg)
        mp = simulate_lie_poisson(A, h, np.linspace(0.5, 1.2, A.dim), mid)
        ep = simulate_euler_poincare(A, l, np.linspace(0.5, 1.2, A.dim), cfg)
        for r in (check_tangent_lift(A, lp, h), check_tangent_lift(A, mp, h), check_tangent_lift_lagrangian(A, ep, l)):
            assert r.tolerance == pytest.approx(max(10 * cfg.step**2, 1e-9), rel=1e-12)
            worst = max(worst, r.max_residual / r.tolerance)
        bad = lp.states.copy()
        bad[len(bad) // 2] += 1e-6
        corrupted = Trajectory(lp.times, bad, lp.labels, meta=lp.meta)
        controls_fail &= not check_tangent_lift(A, corrupted, h).passed
    so3 = builtin_algebra("so3")
    hp = QuadraticProductHamiltonian(np.diag([1.0, 0.5, 1.0 / 3.0]), np.eye(1), K=np.eye(1), C=np.array([[0.3, -0.1, 0.2]]))
    for c in (cfg, mid):
        pt = simulate_product(so3, hp, ProductState([1.0, 0.5, -0.3], [1.0], [0.0]), c)
        worst = max(worst, check_tangent_lift(so3, pt, hp).max_residual / max(10 * c.step**2, 1e-9))
    ok = worst < 1.0 and controls_fail
    record(8, "tangent-lift characterization", ok, f"worst residual/tolerance {worst:.2e} < 1; corrupted trajectories fail: {controls_fail}", time.perf_counter() - t0)


def test_09_graph_isotropy_certificate():
    t0 = time.perf_counter()
    iso, zero = 0.0, 0.0
    for name in BUILTINS:
        A = builtin_algebra(name)
        hq = QuadraticHamiltonian(np.diag(1.0 / np.arange(1.0, A.dim + 1)))
        hc = CustomHamiltonian(lambda p: 0.5 * p @ p + 0.25 * p[0] ** 2 * p[-1] ** 2 + np.cos(p[1]), A.dim)
        iso = max(iso, check_graph_isotropy(hq, N, SEED).max_residual, check_graph_isotropy(hc, 200, SEED).max_residual)
        zero = max(zero, check_invariant_graph_zero_level(A, hq, N, SEED).max_residual, check_invariant_graph_zero_level(A, hc, 100, SEED).max_residual)
    ok = iso < 1e-10 and zero <= 1e-13
    record(9, "graph isotropy certificate", ok, f"isotropy {iso:.1e} < 1e-10; zero level {zero:.1e} <= 1e-13", time.perf_counter() - t0)


def test_10_convergence_orders():
    t0 = time.perf_counter()
    top = AxisymmetricTop()
    rk = convergence_order(top, [0.04, 0.02, 0.01], "rk4")
    mp = convergence_order(top, [0.04, 0.02, 0.01], "midpoint")
    ok = abs(rk.order - 4.0) <= 0.2 and abs(mp.order - 2.0) <= 0.2
    record(10, "convergence orders", ok, f"rk4 {rk.order:.3f} (4 +- 0.2), midpoint {mp.order:.3f} (2 +- 0.2)", time.perf_counter() - t0)


def test_11_product_case():
    t0 = time.perf_counter()
    ab = builtin_algebra("abelian(1)")
    osc = QuadraticProductHamiltonian(np.eye(1), np.eye(1), K=np.eye(1))
    traj = simulate_product(ab, osc, ProductState([0.0], [1.0], [0.0]), IntegratorConfig("rk4", 1e-3, 10.0))
    (drift,) = drift_report(traj, ["energy"])
    phase = float(np.max(np.abs(traj.states[:, 1] - np.cos(traj.times))))

    so3 = builtin_algebra("so3")
    W = np.diag([1.0, 0.5, 1.0 / 3.0])
    C = np.array([[0.3, -0.1, 0.2]])
    value = lambda pi, x, p: 0.5 * pi @ W @ pi + 0.5 * p @ p + 0.5 * x @ x + x @ C @ pi  # noqa: E731
    h = CustomProductHamiltonian(value, 3, 1, gradients=lambda pi, x, p: (W @ pi + C.T @ x, x + C @ pi, p))
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        pi, x, p = rng.normal(size=3), rng.normal(size=1), rng.normal(size=1)
        rhs = hp_product_rhs(so3, h, ProductState(pi, x, p))
        g = fd_gradient(lambda z: value(z[:3], z[3:4], z[4:]), np.concatenate([pi, x, p]))
        oracle = np.concatenate([np.cross(pi, g[:3]), g[4:], -g[3:4]])
        worst = max(worst, float(np.max(np.abs(rhs.as_array() - oracle))))
    ok = drift.max_residual < 1e-8 and worst < 1e-6
    detail = f"oscillator energy drift {drift.max_residual:.1e} < 1e-8 (|x - cos t| {phase:.1e}); coupled rhs vs FD {worst:.1e} < 1e-6"
    record(11, "product case", ok, detail, time.perf_counter() - t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
