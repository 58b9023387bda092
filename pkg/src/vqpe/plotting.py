"""Static PNG rendering of experiment tables (Agg backend, no display needed)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _column(rows, name):
    out = []
    for r in rows:
        v = r.get(name)
        out.append(float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else math.nan)
    return out


LOG_X = ("eps", "s_sv", "max_time", "total_time")


def _groups(rows, column):
    if column is None:
        return [(None, rows)]
    keys = list(dict.fromkeys(r[column] for r in rows))
    return [(k, [r for r in rows if r[column] == k]) for k in keys]


def plot_table(table, path: Path) -> Path:
    """Line plot of ``table.plot = (x, ys, log_y[, group])``.

    With a group column every distinct value gets its own line; unit-circle
    data gets a square aspect.
    """
    x_name, y_names, log_y, *rest = table.plot
    group = rest[0] if rest else None
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    circle = x_name == "cos_theta"
    n_lines = 0
    for key, rows in _groups(table.rows, group):
        x = _column(rows, x_name)
        for name in y_names:
            y = _column(rows, name)
            if log_y:
                y = [abs(v) if v != 0 else math.nan for v in y]
            label = name if key is None else (str(key) if len(y_names) == 1 else f"{key}: {name}")
            if circle:
                ax.plot(x, y, "o", ms=4, label=label)
            else:
                ax.plot(x, y, marker=".", lw=1, label=label)
            n_lines += 1
    if circle:
        ax.set_aspect("equal")
        ax.set_xlim(-1.1, 1.1)
        ax.set_ylim(-1.1, 1.1)
    if log_y:
        ax.set_yscale("log")
    if x_name in LOG_X:
        ax.set_xscale("log")
    ax.set_xlabel(x_name)
    if n_lines > 1:
        ax.legend(fontsize=8)
    if len(y_names) == 1:
        ax.set_ylabel(y_names[0])
    ax.set_title(table.name, fontsize=9)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
