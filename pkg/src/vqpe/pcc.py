"""Phase-cancellation diagnostics for a time grid and a set of support energies.

For support energies ``E_N`` the averaged relative phase

    r(N, M) = | (N_T + 1)^-1  sum_j exp(-i t_j (E_N - E_M)) |

vanishes for all ``N != M`` exactly when the overlap operator of the grid is
a weighted projector onto the support space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .krylov import TimeGrid
from .noise import keyed_rng


@dataclass
class PccReport:
    max_residual: float
    worst_pair: tuple[int, int]
    residuals: np.ndarray
    grid: TimeGrid


@dataclass
class RandomGridStats:
    n_t: int
    mean_residual: float
    std_residual: float
    rms_residual: float
    mean_worst_residual: float | None = None


def perfect_time_step(delta_e: float, n_t: int) -> float:
    """``2 pi / ((N_T + 1) dE)``: the step putting ``N_T + 1`` phases on roots of unity."""
    if not delta_e > 0:
        raise InvalidArgumentError(f"delta_e must be positive, got {delta_e}")
    if n_t < 0:
        raise InvalidArgumentError("n_t must be non-negative")
    return 2 * math.pi / ((n_t + 1) * delta_e)


def residual_matrix(times: np.ndarray, energies: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    phases = np.exp(-1j * np.outer(times, energies))  # (n_times, n_levels)
    # sum_j e^{-i t_j E_N} e^{+i t_j E_M}
    avg = phases.T @ phases.conj() / times.size
    return np.abs(avg)


def pcc_residual(grid: TimeGrid, energies) -> PccReport:
    energies = np.asarray(energies, dtype=float)
    if energies.size < 2:
        raise InvalidArgumentError("at least two energies are needed")
    r = residual_matrix(grid.times, energies)
    off = r.copy()
    np.fill_diagonal(off, -np.inf)
    flat = int(np.argmax(off))
    n, m = divmod(flat, r.shape[1])
    return PccReport(float(off[n, m]), (n, m), r, grid)


def _max_off_diagonal(r: np.ndarray) -> float:
    off = r.copy()
    np.fill_diagonal(off, -np.inf)
    return float(off.max())


def pair_residual(times: np.ndarray, gap: float) -> float:
    return float(abs(np.mean(np.exp(-1j * gap * np.asarray(times)))))


def random_grid_experiment(
    delta_e_min: float,
    gap: float,
    n_t_list,
    trials: int,
    seed: int,
    energies=None,
) -> list[RandomGridStats]:
    """Residual statistics of randomly scaled linear grids.

    Each trial draws ``u`` uniformly from ``[0, 1/dE_min]`` and uses
    ``t_j = (j + 1) u`` for ``j = 0..N_T``. The residual is taken for a pair
    separated by ``gap``; with ``energies`` given, the mean of the worst pair
    over all support levels is reported as well. Trial ``k`` uses its own
    stream keyed by ``(seed, k)``, so every ``N_T`` sees the same draws.
    """
    if not delta_e_min > 0 or gap < delta_e_min:
        raise InvalidArgumentError("need gap >= delta_e_min > 0")
    if trials < 1:
        raise InvalidArgumentError("trials must be at least 1")
    u = np.array([keyed_rng(seed, k).uniform(0.0, 1.0 / delta_e_min) for k in range(trials)])
    out = []
    for n_t in n_t_list:
        if n_t < 0:
            raise InvalidArgumentError("n_t must be non-negative")
        j = np.arange(1, n_t + 2)
        times = np.outer(u, j)  # (trials, n_t + 1)
        res = np.abs(np.mean(np.exp(-1j * gap * times), axis=1))
        worst = None
        if energies is not None:
            worst = float(np.mean([_max_off_diagonal(residual_matrix(row, energies)) for row in times]))
        out.append(
            RandomGridStats(
                int(n_t),
                float(res.mean()),
                float(res.std(ddof=1)) if trials > 1 else 0.0,
                float(np.sqrt(np.mean(res**2))),
                worst,
            )
        )
    return out


def fit_decay_exponent(n_t, values, min_n_t: int = 8) -> float:
    """Least-squares slope of ``log(values)`` against ``log(N_T)`` for ``N_T >= min_n_t``."""
    n_t = np.asarray(n_t, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = n_t >= min_n_t
    if keep.sum() < 2:
        raise InvalidArgumentError("need at least two points inside the fit window")
    slope, _ = np.polyfit(np.log(n_t[keep]), np.log(values[keep]), 1)
    return float(slope)


def phase_circle(grid: TimeGrid, energy_gap: float) -> np.ndarray:
    """Unit-circle points ``(cos theta_j, sin theta_j)`` with ``theta_j = -t_j gap mod 2 pi``."""
    theta = np.mod(-grid.times * energy_gap, 2 * math.pi)
    return np.column_stack([np.cos(theta), np.sin(theta)])
