"""Step-like convergence detection and iterative time-step refinement.

A trace is step-like when adding expansion states repeatedly fails to add a
singular value above the threshold: ``n_svd`` stays flat for a while before
the next improving state. The refinement loop stretches the time step by the
length of that first plateau and retries until convergence is no longer
step-like.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProblemError, InvalidArgumentError
from .hamiltonian import Hamiltonian
from .krylov import SolverConfig
from .trace import ConvergenceTrace, convergence_trace, make_propagator

LOG_COLUMNS = ("round", "dt", "plateau_length", "n_svd_final", "best_energy")


@dataclass
class StepReport:
    """``plateau_lengths`` are maximal runs of constant ``n_svd`` (in steps).

    ``first_plateau`` is the first run long enough to count that is followed by an
    improving state; ``recommended_dt`` spans it through that improving state
    (``L * dt``), ``recommended_dt_to_last`` stops at its last flat state
    (``(L - 1) * dt``).
    """

    is_step_like: bool
    plateau_lengths: list[int]
    recommended_dt: float
    recommended_dt_to_last: float
    first_plateau: tuple[int, int] | None = None


def minimal_time_step(epsilon: float, delta_e_min: float) -> float:
    """Below ``eps / dE_min`` consecutive states differ by less than the noise."""
    if epsilon < 0 or not delta_e_min > 0:
        raise InvalidArgumentError("need epsilon >= 0 and delta_e_min > 0")
    return epsilon / delta_e_min


def _runs(values) -> list[tuple[int, int]]:
    runs, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] != values[start]:
            runs.append((start, i - start))
            start = i
    return runs


def improvement_flags(trace: ConvergenceTrace, criterion: str = "n_svd", energy_tol: float = 1e-10) -> list[int]:
    """Per-entry labels whose runs define plateaus.

    ``n_svd`` labels each entry by its retained dimension. ``energy`` starts a
    new label whenever the ground energy drops by more than ``energy_tol``.
    """
    if criterion == "n_svd":
        return [int(v) for v in trace.n_svd]
    if criterion == "energy":
        e = trace.ground_energies
        labels, cur, best = [], 0, e[0] if len(e) else np.nan
        for i, v in enumerate(e):
            if i and np.isfinite(v) and (not np.isfinite(best) or v < best - energy_tol):
                cur += 1
            if np.isfinite(v):
                best = v if not np.isfinite(best) else min(best, v)
            labels.append(cur)
        return labels
    raise InvalidArgumentError(f"unknown step criterion {criterion!r}")


def detect_steps(
    trace: ConvergenceTrace,
    s_sv: float | None = None,
    *,
    criterion: str = "n_svd",
    energy_tol: float = 1e-10,
    min_plateau: int = 2,
) -> StepReport:
    """Find plateaus in a trace taken on a uniform stride.

    ``s_sv`` is accepted for symmetry with the solver configuration; the
    trace already carries the thresholded ``n_svd``. A step is a run of at
    least ``min_plateau`` entries that starts in the first half of the trace
    and is followed by an improving entry.
    """
    if len(trace) == 0:
        raise InvalidArgumentError("empty trace")
    labels = improvement_flags(trace, criterion, energy_tol)
    runs = _runs(labels)
    lengths = [length for _, length in runs]
    stride = int(trace.n_t[1] - trace.n_t[0]) if len(trace) > 1 else 1
    step_dt = trace.dt * stride
    half = len(labels) / 2
    first = None
    for k, (start, length) in enumerate(runs):
        closed = k + 1 < len(runs)
        # a repeated label at index start+1 is the first "step" of this run
        if length >= min_plateau and closed and start + 1 <= half:
            first = (start, length)
            break
    if first is None:
        return StepReport(False, lengths, step_dt, step_dt)
    length = first[1]
    return StepReport(True, lengths, length * step_dt, max(length - 1, 1) * step_dt, first)


def refine_time_step(
    h: Hamiltonian,
    psi0: np.ndarray,
    dt0: float,
    s_sv: float,
    n_t_budget: int,
    max_rounds: int,
    *,
    propagator_kind: str = "auto",
    criterion: str = "n_svd",
    min_plateau: int = 2,
    spectrum=None,
) -> tuple[float, list[dict]]:
    """Run traces at growing ``dt`` until convergence is no longer step-like.

    Returns the final time step and one log row per round with the columns in
    ``LOG_COLUMNS`` plus ``plateau_length_to_last``.
    """
    if not dt0 > 0:
        raise InvalidArgumentError("dt0 must be positive")
    if min_plateau < 2:
        raise InvalidArgumentError("min_plateau must be at least 2")
    if n_t_budget < 1 or max_rounds < 0:
        raise InvalidArgumentError("n_t_budget must be >= 1 and max_rounds >= 0")
    config = SolverConfig(s_sv=s_sv)
    prop = make_propagator(h, dt0, propagator_kind, spectrum=spectrum)
    dt, log = dt0, []
    for rnd in range(max_rounds):
        trace = convergence_trace(h, psi0, prop.with_dt(dt), config, n_t_budget)
        if trace.n_svd.max() == 0:
            raise DegenerateProblemError(
                f"no singular value above s_sv={s_sv:g} within {n_t_budget} steps at dt={dt:g}"
            )
        report = detect_steps(trace, s_sv, criterion=criterion, min_plateau=min_plateau)
        plateau = report.first_plateau[1] if report.first_plateau else 0
        log.append(
            {
                "round": rnd,
                "dt": dt,
                "plateau_length": plateau,
                "plateau_length_to_last": max(plateau - 1, 0),
                "n_svd_final": int(trace.n_svd[-1]),
                "best_energy": float(np.nanmin(trace.ground_energies)),
            }
        )
        if not report.is_step_like:
            break
        dt = max(dt, report.recommended_dt)
    return dt, log
