"""Readers and writers for trajectory CSV, check-report JSON and plot data."""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .verification import CheckReport

STATE_COLUMN = re.compile(r"^(pi|xi|x|p|y)\d+$")


def _fmt(v):
    return format(float(v), ".17g")


def write_trajectory_csv(path, traj, extra=None):
    """Header ``t,<state columns>,<diagnostic columns>``; one row per sample.

    ``extra`` maps further column names to per-sample arrays (scalar or
    vector valued; vectors are split into ``name_1, name_2, ...``).
    """
    columns = {}
    for name, series in list(traj.diagnostics.items()) + list((extra or {}).items()):
        series = np.asarray(series, dtype=float)
        if series.ndim == 1:
            columns[name] = series
        else:
            for i in range(series.shape[1]):
                columns[f"{name}_{i + 1}"] = series[:, i]
    header = ["t", *traj.labels, *columns]
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(len(traj)):
            row = [traj.times[k], *traj.states[k], *(c[k] for c in columns.values())]
            w.writerow([_fmt(v) for v in row])
    return path


def read_trajectory_csv(path):
    """Inverse of :func:`write_trajectory_csv` (state columns recognised by name)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "t":
        raise ValueError(f"{path}: not a trajectory CSV")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    state_idx = [i for i, h in enumerate(header) if STATE_COLUMN.match(h)]
    diag_idx = [i for i, h in enumerate(header[1:], start=1) if i not in state_idx]
    return Trajectory(
        data[:, 0],
        data[:, state_idx],
        [header[i] for i in state_idx],
        diagnostics={header[i]: data[:, i] for i in diag_idx},
    )


def write_reports_json(path, reports):
    with open(path, "w") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2)
        fh.write("\n")
    return Path(path)


def read_reports_json(path):
    with open(path) as fh:
        return [CheckReport.from_dict(d) for d in json.load(fh)]


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return Path(path)


def write_plot_data(directory, traj, extra=None):
    """One two-column ``t value`` file per diagnostic, named ``<diagnostic>.dat``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    series = dict(traj.diagnostics)
    series.update(extra or {})
    for name, values in series.items():
        values = np.asarray(values, dtype=float)
        cols = [values] if values.ndim == 1 else [values[:, i] for i in range(values.shape[1])]
        names = [name] if values.ndim == 1 else [f"{name}_{i + 1}" for i in range(values.shape[1])]
        for n, v in zip(names, cols):
            p = directory / f"{n}.dat"
            with open(p, "w") as fh:
                fh.write(f"# t {n}\n")
                for t, x in zip(traj.times, v):
                    fh.write(f"{_fmt(t)} {_fmt(x)}\n")
            written.append(p)
    return written


def read_plot_data(path):
    return np.loadtxt(path, comments="#")
