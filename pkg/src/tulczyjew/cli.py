"""Command-line front end.

    tulczyjew simulate      --config run.json [--algebra so3] [--dt 1e-3] ...
    tulczyjew verify        --all --algebra so3 --seed 42
    tulczyjew equivalence   --algebra se3 --out results/
    tulczyjew list-algebras

Exit codes: 0 success (and every check passed), 1 a check failed,
2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .dynamics import (
    IntegratorConfig,
    equivalence_run,
    reconstruct,
    simulate_euler_poincare,
    simulate_lie_poisson,
    simulate_product,
)
from .errors import ConfigError, TulczyjewError
from .io import write_json, write_plot_data, write_reports_json, write_trajectory_csv
from .lie import BUILTIN_NAMES, GroupElement, builtin_algebra, load_algebra
from .maps import ProductState
from .models import (
    CustomHamiltonian,
    CustomLagrangian,
    CustomProductHamiltonian,
    QuadraticHamiltonian,
    QuadraticLagrangian,
    QuadraticProductHamiltonian,
    hamiltonian_from_lagrangian,
)
from .verification import (
    TOL_DRIFT,
    check_tangent_lift,
    check_tangent_lift_lagrangian,
    drift_report,
    format_table,
    run_all_checks,
)

log = logging.getLogger("tulczyjew")

MODES = ("simulate", "verify", "equivalence", "list-algebras")
EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4
EQUIVALENCE_TOL = 1e-8

DEFAULTS = {
    "algebra": "so3",
    "integrator": {"method": "rk4", "dt": 1e-3, "t_final": 10.0},
    "seed": 42,
    "samples": 1000,
    "out": "out",
    "plot_data": False,
    "reconstruct": False,
}

_EXPR_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "tanh", "cosh", "sinh", "abs", "dot", "sum", "pi")
}


# ---------------------------------------------------------------- config


def load_config(path):
    """Read a JSON config; parse errors become :class:`ConfigError` with line numbers."""
    try:
        text = Path(path).read_text()
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: no such config file") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1:1: config must be a JSON object")
    return data


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _set_path(cfg, dotted, value):
    keys = dotted.replace("-", "_").split(".")
    if len(keys) == 1 and keys[0] in ("dt", "t_final", "method", "newton_tol", "newton_max_iter"):
        keys = ["integrator", keys[0]]
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def _compile_expression(expr, var):
    try:
        code = compile(expr, "<expression>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"model expression does not parse: {exc.msg}") from exc

    def f(*args):
        ns = dict(_EXPR_NAMESPACE)
        ns.update(zip(var, args))
        return eval(code, {"__builtins__": {}}, ns)

    return f


def _matrix(model, key, dim):
    if key not in model:
        return None
    m = np.asarray(model[key], dtype=float)
    if m.ndim == 1:
        m = np.diag(m)
    if m.shape != (dim, dim):
        raise ConfigError(f"model.{key} must be {dim}x{dim} (or a length-{dim} diagonal)")
    return m


def build_model(model, A):
    """Return ``(kind, model_object)`` where kind is hamiltonian, lagrangian or product."""
    kind = model.get("type", "hamiltonian")
    d = A.dim
    try:
        if kind == "hamiltonian":
            if "expression" in model:
                return kind, CustomHamiltonian(_compile_expression(model["expression"], ["pi"]), d)
            if "W" in model:
                return kind, QuadraticHamiltonian(_matrix(model, "W", d), model.get("b"))
            inertia = _matrix(model, "inertia", d)
            inertia = np.diag(np.arange(1.0, d + 1)) if inertia is None else inertia
            return kind, hamiltonian_from_lagrangian(QuadraticLagrangian(inertia))
        if kind == "lagrangian":
            if "expression" in model:
                return kind, CustomLagrangian(_compile_expression(model["expression"], ["xi"]), d)
            inertia = _matrix(model, "inertia", d)
            return kind, QuadraticLagrangian(np.diag(np.arange(1.0, d + 1)) if inertia is None else inertia)
        if kind == "product":
            n = int(model.get("base_dim", 1))
            if "expression" in model:
                f = _compile_expression(model["expression"], ["pi", "x", "p"])
                return kind, CustomProductHamiltonian(f, d, n)
            W = _matrix(model, "W", d)
            if W is None:
                W = np.diag(1.0 / np.arange(1.0, d + 1))
            Wp = np.asarray(model.get("Wp", np.eye(n)), dtype=float)
            Wp = np.diag(Wp) if Wp.ndim == 1 else Wp
            K = model.get("K")
            if K is not None:
                K = np.asarray(K, dtype=float)
                K = np.diag(K) if K.ndim == 1 else K
            return kind, QuadraticProductHamiltonian(W, Wp, K, model.get("b"), model.get("k"), model.get("C"))
    except TulczyjewError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc
    raise ConfigError(f"model.type must be hamiltonian, lagrangian or product, got {kind!r}")


def _integrator(cfg):
    ic = cfg.get("integrator", {})
    try:
        return IntegratorConfig(
            method=ic.get("method", "rk4"),
            dt=float(ic.get("dt", 1e-3)),
            t_final=float(ic.get("t_final", 10.0)),
            newton_tol=float(ic.get("newton_tol", 1e-12)),
            newton_max_iter=int(ic.get("newton_max_iter", 50)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid integrator settings: {exc}") from exc


def _algebra(cfg):
    try:
        return load_algebra(cfg.get("algebra", "so3"))
    except TulczyjewError as exc:
        raise ConfigError(str(exc)) from exc
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load algebra: {exc}") from exc


def _initial(cfg, A, kind, model):
    init = cfg.get("initial_state")
    if kind == "product":
        init = init or {}
        try:
            return ProductState(
                np.asarray(init.get("pi", np.ones(A.dim)), dtype=float),
                np.asarray(init.get("x", np.ones(model.n)), dtype=float),
                np.asarray(init.get("p", np.zeros(model.n)), dtype=float),
            )
        except AttributeError as exc:
            raise ConfigError("product initial_state must be an object with pi, x, p") from exc
    y = np.ones(A.dim) if init is None else np.asarray(init, dtype=float)
    if y.shape != (A.dim,):
        raise ConfigError(f"initial_state has {y.size} entries, algebra {A.name} has dim {A.dim}")
    return y


# ---------------------------------------------------------------- modes


def _simulate(cfg, out):
    A = _algebra(cfg)
    kind, model = build_model(cfg.get("model", {}), A)
    icfg = _integrator(cfg)
    y0 = _initial(cfg, A, kind, model)
    summary = {"algebra": A.name, "model": kind, "method": icfg.method, "dt": icfg.step, "t_final": icfg.t_final}
    extra = {}
    lift = None
    if kind == "hamiltonian":
        traj = simulate_lie_poisson(A, model, y0, icfg)
        quantities = ["energy"] + [q for q in ("casimir_so3", "casimir_heis") if q in traj.diagnostics]
        group = None
        if cfg.get("reconstruct"):
            g0 = cfg.get("g0")
            group = reconstruct(A, traj, model, None if g0 is None else GroupElement.exp(A, g0))
            extra["spatial_momentum"] = group.spatial_momentum
            quantities.append("spatial_momentum")
        drifts = drift_report(traj, quantities, group)
        lift = check_tangent_lift(A, traj, model)
    elif kind == "lagrangian":
        traj = simulate_euler_poincare(A, model, y0, icfg)
        drifts = drift_report(traj, ["energy"])
        lift = check_tangent_lift_lagrangian(A, traj, model)
    else:
        traj = simulate_product(A, model, y0, icfg)
        drifts = drift_report(traj, ["energy"])
        lift = check_tangent_lift(A, traj, model)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / "trajectory.csv", traj, extra)
    summary["rows"] = len(traj)
    summary["drift"] = {r.name: r.to_dict() for r in drifts}
    summary["tangent_lift"] = lift.to_dict()
    summary["backend"] = BACKEND
    write_json(out / "diagnostics.json", summary)
    if cfg.get("plot_data"):
        write_plot_data(out / "plot", traj, extra)
    for r in drifts + [lift]:
        print(f"{r.name}: max {r.max_residual:.3e} (tol {r.tolerance:.1e}) {'PASS' if r.passed else 'FAIL'}")
    print(f"wrote {out / 'trajectory.csv'} ({len(traj)} rows)")
    return EXIT_OK


def _verify(cfg, out):
    A = _algebra(cfg)
    icfg = _integrator(cfg)
    reports = run_all_checks(
        A,
        seed=int(cfg.get("seed", 42)),
        samples=int(cfg.get("samples", 1000)),
        dt=icfg.dt,
        t_final=min(icfg.t_final, 1.0),
    )
    out.mkdir(parents=True, exist_ok=True)
    write_reports_json(out / "report.json", reports)
    print(format_table(reports))
    ok = all(r.passed for r in reports)
    print(f"{sum(r.passed for r in reports)}/{len(reports)} checks passed; report at {out / 'report.json'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _equivalence(cfg, out):
    A = _algebra(cfg)
    model_cfg = cfg.get("model", {"type": "lagrangian"})
    if model_cfg.get("type", "lagrangian") != "lagrangian":
        raise ConfigError("equivalence mode requires a lagrangian model")
    _, l = build_model(dict(model_cfg, type="lagrangian"), A)
    icfg = _integrator(cfg)
    xi0 = _initial(cfg, A, "lagrangian", l)
    ep, lp, dev = equivalence_run(A, l, xi0, icfg)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(out / "trajectory_lagrangian.csv", ep)
    write_trajectory_csv(out / "trajectory_hamiltonian.csv", lp)
    summary = {
        "algebra": A.name,
        "method": icfg.method,
        "dt": icfg.step,
        "t_final": icfg.t_final,
        "max_deviation": dev,
        "tolerance": EQUIVALENCE_TOL,
        "pass": dev <= EQUIVALENCE_TOL,
    }
    write_json(out / "summary.json", summary)
    if cfg.get("plot_data"):
        write_plot_data(out / "plot_lagrangian", ep)
        write_plot_data(out / "plot_hamiltonian", lp)
    print(f"max |F_l(xi(t)) - pi(t)| = {dev:.3e} (tol {EQUIVALENCE_TOL:.0e}) {'PASS' if summary['pass'] else 'FAIL'}")
    return EXIT_OK if summary["pass"] else EXIT_CHECK_FAILED


def _list_algebras(cfg, out):
    for name in ("so3", "se3", "sl2", "heisenberg3"):
        print(f"{name}\t{builtin_algebra(name).dim}")
    print("abelian(n)\tn")
    return EXIT_OK


_DISPATCH = {"simulate": _simulate, "verify": _verify, "equivalence": _equivalence, "list-algebras": _list_algebras}


def run(config):
    """Run one configuration dict; returns the process exit code."""
    mode = config.get("mode")
    if mode not in MODES:
        print(f"error: mode must be one of {', '.join(MODES)}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = _merge(DEFAULTS, config)
    try:
        return _DISPATCH[mode](cfg, Path(cfg.get("out", "out")))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TulczyjewError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


# ---------------------------------------------------------------- sweeps


def parse_sweep(text):
    """``param=start:stop:count`` -> ``(param, values)`` (linearly spaced)."""
    try:
        param, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ConfigError(f"--sweep expects param=start:stop:count, got {text!r}") from exc
    if int(count) < 1:
        raise ConfigError("--sweep count must be positive")
    if param in ("seed", "samples", "integrator.newton_max_iter"):
        values = [int(round(v)) for v in values]
    else:
        values = [float(v) for v in values]
    return param.strip(), values


def run_sweep(config, sweep, workers=None):
    param, values = parse_sweep(sweep)
    base_out = Path(config.get("out", DEFAULTS["out"]))
    jobs = []
    for i, v in enumerate(values):
        c = copy.deepcopy(config)
        _set_path(c, param, v)
        c["out"] = str(base_out / f"run_{i:03d}")
        jobs.append(c)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(run, jobs))
    base_out.mkdir(parents=True, exist_ok=True)
    write_json(
        base_out / "sweep.json",
        {"param": param, "runs": [{"value": v, "out": j["out"], "exit": c} for v, j, c in zip(values, jobs, codes)]},
    )
    return max(codes)


# ---------------------------------------------------------------- argv


def build_parser():
    p = argparse.ArgumentParser(prog="tulczyjew", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        s = sub.add_parser(mode)
        s.add_argument("--config", help="JSON config file")
        s.add_argument("--algebra", help=f"builtin ({', '.join(BUILTIN_NAMES)}) or JSON definition file")
        s.add_argument("--seed", type=int)
        s.add_argument("--dt", type=float)
        s.add_argument("--t-final", type=float)
        s.add_argument("--method", choices=("rk4", "midpoint"))
        s.add_argument("--out", help="output directory")
        s.add_argument("--plot-data", action="store_true", help="write (t, value) files per diagnostic")
        s.add_argument("--sweep", help="param=start:stop:count; runs concurrently into per-run subdirectories")
        s.add_argument("--workers", type=int, help="processes for --sweep")
        if mode == "verify":
            s.add_argument("--all", action="store_true", help="run every check (the default)")
            s.add_argument("--samples", type=int)
    return p


def config_from_args(args):
    cfg = load_config(args.config) if args.config else {}
    cfg["mode"] = args.mode
    for flag, path in (
        ("algebra", "algebra"),
        ("seed", "seed"),
        ("dt", "integrator.dt"),
        ("t_final", "integrator.t_final"),
        ("method", "integrator.method"),
        ("out", "out"),
        ("samples", "samples"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            _set_path(cfg, path, v)
    if args.plot_data:
        cfg["plot_data"] = True
    return cfg


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.sweep:
            return run_sweep(cfg, args.sweep, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
