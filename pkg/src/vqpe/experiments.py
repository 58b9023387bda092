"""Experiment drivers behind the command-line interface.

Each ``cmd_*`` function computes its study and returns an
:class:`ExperimentResult` holding named tables; writing them (CSV, manifest,
optional figures) is left to :func:`write_result`, so the drivers are usable
from Python without touching the filesystem.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from . import __version__
from .errors import InvalidArgumentError
from .hamiltonian import (
    DEFAULT_DENSE_CAP,
    Hamiltonian,
    PauliSumHamiltonian,
    Spectrum,
    build_linear_spectrum,
    build_tfim,
    diagonalize,
    load_hamiltonian,
    make_reference,
    parse_reference,
    support_space,
)
from .io import write_csv, write_json
from .krylov import SolverConfig, TimeGrid, assemble_s, measure_overlap_generator, relative_error
from .noise import NoiseSpec
from .pcc import perfect_time_step, phase_circle
from .qpe import CURVE_COLUMNS, idealized_accuracy_curves, qpe_resources, vqpe_resources
from .timestep import LOG_COLUMNS, refine_time_step
from .trace import ConvergenceTrace, convergence_trace, make_propagator, trace_from_generator

DEFAULT_S_SV = 1e-1
CHEMICAL_ACCURACY = 1.6e-3
ENERGY_UNITS = "energies and errors in the units of the input Hamiltonian (hbar = 1)"


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list
    comments: list[str] = field(default_factory=list)
    # plotting hint: (x column, [y columns], log-scale y[, group column])
    plot: tuple | None = None


@dataclass
class ExperimentResult:
    command: str
    config: dict
    tables: list[Table]
    summary: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)


# -- shared helpers -----------------------------------------------------------


def resolve_hamiltonian(spec) -> Hamiltonian:
    """``harmonic:dE,D``, ``tfim:n[,J[,h]]``, a JSON file path, or a Hamiltonian object."""
    if not isinstance(spec, str):
        return spec
    kind, _, args = spec.partition(":")
    try:
        if kind == "harmonic":
            de, dim = args.split(",")
            return build_linear_spectrum(float(de), int(dim))
        if kind == "tfim":
            parts = [float(x) for x in args.split(",")]
            n = int(parts[0])
            return build_tfim(n, *parts[1:3])
    except ValueError as exc:
        raise InvalidArgumentError(f"cannot parse Hamiltonian spec {spec!r}: {exc}") from exc
    return load_hamiltonian(spec)


def resolve_reference(ref, h: Hamiltonian, spectrum: Spectrum | None) -> np.ndarray:
    if isinstance(ref, np.ndarray):
        return ref
    params = parse_reference(ref) if isinstance(ref, str) else dict(ref)
    kind = params.pop("kind")
    n_qubits = h.n_qubits if isinstance(h, PauliSumHamiltonian) else None
    return make_reference(
        kind, spectrum=spectrum, n_qubits=n_qubits, dimension=h.dimension, **params
    )


def _strided(n_t_max: int, stride: int) -> list[int] | None:
    if stride < 1:
        raise InvalidArgumentError("stride must be at least 1")
    if stride == 1:
        return None
    values = list(range(0, n_t_max + 1, stride))
    if values[-1] != n_t_max:
        values.append(n_t_max)
    return values


def _spectrum_or_none(h: Hamiltonian, dense_cap: int) -> Spectrum | None:
    if h.dimension <= dense_cap:
        return diagonalize(h, dense_cap)
    return None


def _ground_energy(h: Hamiltonian, spectrum: Spectrum | None) -> float:
    if spectrum is not None:
        return spectrum.ground_energy
    op = LinearOperator((h.dimension, h.dimension), matvec=h.matvec, dtype=complex)
    return float(eigsh(op, k=1, which="SA", return_eigenvectors=False)[0])


def _resolve_dt(dt, delta_e: float, q: int) -> float:
    if dt == "perfect":
        return perfect_time_step(delta_e, q - 1)
    dt = float(dt)
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive or 'perfect'")
    return dt


def _convergence_rows(trace: ConvergenceTrace, exact: np.ndarray, n_levels: int, extra=None):
    rows = []
    for e in trace:
        row = {"n_t": e.n_t}
        if extra:
            row.update(extra)
        for k in range(n_levels):
            est = e.energy(k)
            row[f"eps_{k}"] = est
            row[f"rel_err_{k}"] = (
                float(relative_error(est, exact[k])) if k < exact.size and math.isfinite(est) else math.nan
            )
        row.update(
            n_svd=e.n_svd,
            condition_number=e.condition_number,
            total_time=e.total_time,
            cumulative_time=e.cumulative_time,
        )
        rows.append(row)
    return rows


def _convergence_columns(n_levels: int, extra=()):
    cols = ["n_t", *extra]
    for k in range(n_levels):
        cols += [f"eps_{k}", f"rel_err_{k}"]
    return cols + ["n_svd", "condition_number", "total_time", "cumulative_time"]


# -- commands -----------------------------------------------------------------


def cmd_harmonic(
    delta_e: float = 0.75,
    dimension: int = 16,
    beta: float = 1.0,
    dt="perfect",
    n_t_max: int = 30,
    s_sv: float = DEFAULT_S_SV,
    n_levels: int = 4,
    formulation: str = "hermitian",
) -> ExperimentResult:
    """Convergence of the lowest levels of a linear spectrum from a Boltzmann reference."""
    h = build_linear_spectrum(delta_e, dimension)
    spec = diagonalize(h)
    psi0 = make_reference("boltzmann", spectrum=spec, beta=beta)
    q = support_space(psi0, spec).q
    step = _resolve_dt(dt, delta_e, q)
    config = SolverConfig(s_sv, formulation, step if formulation == "unitary" else None)
    trace = convergence_trace(h, psi0, make_propagator(h, step, spectrum=spec), config, n_t_max)
    conv = Table(
        "harmonic_convergence",
        _convergence_columns(n_levels),
        _convergence_rows(trace, spec.energies, n_levels),
        [ENERGY_UNITS, f"dt = {step!r}, relative error |eps - E| / max(|E|, 1)"],
        ("n_t", [f"rel_err_{k}" for k in range(n_levels)], True),
    )
    points = phase_circle(TimeGrid.linear(step, n_t_max), delta_e)
    circle = Table(
        "harmonic_phase_circle",
        ["j", "time", "cos_theta", "sin_theta"],
        [
            {"j": j, "time": j * step, "cos_theta": c, "sin_theta": s}
            for j, (c, s) in enumerate(points)
        ],
        [f"theta_j = -t_j * {delta_e!r} mod 2 pi"],
        ("cos_theta", ["sin_theta"], False),
    )
    last = trace[-1]
    summary = {
        "dt": step,
        "support_size": q,
        "final_n_svd": last.n_svd,
        "final_relative_errors": [
            float(relative_error(last.energy(k), spec.energies[k])) if k < last.n_svd else None
            for k in range(min(n_levels, dimension))
        ],
    }
    config_snapshot = dict(
        delta_e=delta_e, dimension=dimension, beta=beta, dt=dt, n_t_max=n_t_max,
        s_sv=s_sv, n_levels=n_levels, formulation=formulation,
    )
    return ExperimentResult("harmonic", config_snapshot, [conv, circle], summary)


def noise_traces(
    delta_e: float,
    dimension: int,
    beta: float,
    epsilon: float,
    s_sv: float,
    n_t_max: int,
    seeds,
    dt="perfect",
    mode: str = "element",
    stride: int = 1,
):
    """Per-seed noisy traces of the harmonic system and the exact energies."""
    h = build_linear_spectrum(delta_e, dimension)
    spec = diagonalize(h)
    psi0 = make_reference("boltzmann", spectrum=spec, beta=beta)
    step = _resolve_dt(dt, delta_e, support_space(psi0, spec).q)
    prop = make_propagator(h, step, spectrum=spec)
    values = _strided(n_t_max, stride)
    gen = measure_overlap_generator(prop, psi0, n_t_max, h)
    traces = {}
    for seed in seeds:
        noise = NoiseSpec(mode, epsilon, seed=int(seed)) if epsilon > 0 else None
        traces[int(seed)] = trace_from_generator(
            gen, SolverConfig(s_sv), n_t_max, n_t_values=values, noise=noise
        )
    return traces, spec.energies, step


def cmd_noise(
    delta_e: float = 0.75,
    dimension: int = 16,
    beta: float = 1.0,
    epsilon_list=(1e-2,),
    s_sv_list=(0.9,),
    n_t_max: int = 100,
    seeds=(0,),
    dt="perfect",
    mode: str = "element",
    n_levels: int = 5,
    n_singular: int = 8,
    stride: int = 1,
    allow_low_threshold: bool = False,
) -> ExperimentResult:
    """Noisy harmonic runs: per-seed traces, seed medians and singular-value trajectories."""
    tables = []
    summary = {}
    for eps in epsilon_list:
        for s_sv in s_sv_list:
            # the threshold must sit about two decades above the noise
            if eps > 0 and round(math.log10(s_sv / eps)) < 2 and not allow_low_threshold:
                raise InvalidArgumentError(
                    f"s_sv={s_sv:g} is not two orders of magnitude above epsilon={eps:g}; "
                    "pass allow_low_threshold to override"
                )
            traces, exact, step = noise_traces(
                delta_e, dimension, beta, eps, s_sv, n_t_max, seeds, dt, mode, stride
            )
            tag = f"eps{eps:g}_ssv{s_sv:g}"
            rows = []
            for seed, trace in traces.items():
                rows += _convergence_rows(trace, exact, n_levels, {"seed": seed})
            tables.append(
                Table(
                    f"noise_{tag}_trace",
                    _convergence_columns(n_levels, ["seed"]),
                    rows,
                    [ENERGY_UNITS, f"noise mode {mode}, epsilon {eps:g}, s_sv {s_sv:g}, dt {step!r}"],
                )
            )
            first = next(iter(traces.values()))
            med_rows = []
            for i, entry in enumerate(first):
                row = {"n_t": entry.n_t}
                for k in range(n_levels):
                    errs = [
                        float(relative_error(t[i].energy(k), exact[k])) for t in traces.values()
                    ]
                    row[f"median_rel_err_{k}"] = float(np.nanmedian(errs)) if not all(
                        math.isnan(x) for x in errs
                    ) else math.nan
                row["median_n_svd"] = float(np.median([t[i].n_svd for t in traces.values()]))
                med_rows.append(row)
            tables.append(
                Table(
                    f"noise_{tag}_median",
                    ["n_t", *[f"median_rel_err_{k}" for k in range(n_levels)], "median_n_svd"],
                    med_rows,
                    [f"median over {len(traces)} seeds"],
                    ("n_t", [f"median_rel_err_{k}" for k in range(n_levels)], True),
                )
            )
            sv_rows = []
            for seed, trace in traces.items():
                for e in trace:
                    row = {"n_t": e.n_t, "seed": seed}
                    for k in range(n_singular):
                        row[f"sigma_{k + 1}"] = e.singular_value(k)
                    sv_rows.append(row)
            tables.append(
                Table(
                    f"noise_{tag}_singular_values",
                    ["n_t", "seed", *[f"sigma_{k + 1}" for k in range(n_singular)]],
                    sv_rows,
                    ["eigenvalues of the Hermitized overlap matrix, descending"],
                )
            )
            summary[tag] = {
                "final_median_ground_rel_err": med_rows[-1]["median_rel_err_0"],
                "dt": step,
            }
    config = dict(
        delta_e=delta_e, dimension=dimension, beta=beta, epsilon_list=list(epsilon_list),
        s_sv_list=list(s_sv_list), n_t_max=n_t_max, dt=dt, mode=mode, n_levels=n_levels,
        n_singular=n_singular, stride=stride,
    )
    return ExperimentResult("noise", config, tables, summary, [int(s) for s in seeds])


def cmd_condition(
    delta_e: float = 0.05,
    dimension: int = 20,
    beta: float = 10.0,
    s_sv: float = DEFAULT_S_SV,
    epsilon: float = 1e-3,
    mode: str = "toeplitz",
    n_t_max: int = 40,
    seed: int = 0,
    dt="perfect",
) -> ExperimentResult:
    """Condition number of the full overlap matrix against the truncated ground error."""
    clean, exact, step = noise_traces(delta_e, dimension, beta, 0.0, s_sv, n_t_max, [seed], dt)
    noisy, _, _ = noise_traces(delta_e, dimension, beta, epsilon, s_sv, n_t_max, [seed], dt, mode)
    rows = []
    for a, b in zip(clean[seed], noisy[seed]):
        rows.append(
            {
                "n_t": a.n_t,
                "rel_err_clean": float(relative_error(a.ground_energy, exact[0])),
                "rel_err_noisy": float(relative_error(b.ground_energy, exact[0])),
                "condition_clean": a.condition_number,
                "condition_noisy": b.condition_number,
                "n_svd_clean": a.n_svd,
                "n_svd_noisy": b.n_svd,
            }
        )
    cols = ["n_t", "rel_err_clean", "rel_err_noisy", "condition_clean", "condition_noisy",
            "n_svd_clean", "n_svd_noisy"]
    table = Table(
        "condition",
        cols,
        rows,
        [ENERGY_UNITS, f"noise mode {mode}, epsilon {epsilon:g}, s_sv {s_sv:g}, dt {step!r}"],
        ("n_t", ["rel_err_clean", "rel_err_noisy", "condition_clean", "condition_noisy"], True),
    )
    finite = [r["condition_clean"] for r in rows if math.isfinite(r["condition_clean"])]
    summary = {
        "max_finite_condition_clean": max(finite) if finite else None,
        "final_rel_err_noisy": rows[-1]["rel_err_noisy"],
        "dt": step,
    }
    config = dict(delta_e=delta_e, dimension=dimension, beta=beta, s_sv=s_sv, epsilon=epsilon,
                  mode=mode, n_t_max=n_t_max, dt=dt)
    return ExperimentResult("condition", config, [table], summary, [seed])


def cmd_tfim(
    n_sites: int = 10,
    j_coupling: float = 1.0,
    h_field: float = 2.0,
    dt: float = 0.05,
    n_t_max: int = 100,
    shots: int | None = None,
    s_sv: float = DEFAULT_S_SV,
    reference: str = "basis:0",
    seeds=(0,),
    propagation: str = "exact",
    formulation: str | None = None,
    stride: int = 1,
    dense_cap: int = DEFAULT_DENSE_CAP,
) -> ExperimentResult:
    """Ground-energy trace of the open transverse-field Ising chain.

    ``propagation`` is ``exact`` (eigenbasis within the dense cap, Lanczos
    beyond) or ``trotter``; Trotterized runs default to the unitary solve.
    """
    h = build_tfim(n_sites, j_coupling, h_field)
    spec = _spectrum_or_none(h, min(dense_cap, 4096))
    e0 = _ground_energy(h, spec)
    psi0 = resolve_reference(reference, h, spec)
    if propagation == "exact":
        prop = make_propagator(h, dt, spectrum=spec, dense_cap=min(dense_cap, 4096))
    elif propagation == "trotter":
        prop = make_propagator(h, dt, "trotter1")
    else:
        raise InvalidArgumentError(f"unknown propagation {propagation!r}")
    formulation = formulation or ("unitary" if propagation == "trotter" else "hermitian")
    config = SolverConfig(s_sv, formulation, dt if formulation == "unitary" else None)
    values = _strided(n_t_max, stride)
    seeds = [int(s) for s in seeds] if shots else []
    runs = {}
    if shots:
        for seed in seeds:
            noise = NoiseSpec("shots", shots=int(shots), seed=seed)
            runs[seed] = convergence_trace(h, psi0, prop, config, n_t_max, n_t_values=values, noise=noise)
    else:
        runs[None] = convergence_trace(h, psi0, prop, config, n_t_max, n_t_values=values)
    cols = ["n_t", "seed", "eps_0", "exact_e0", "abs_error", "n_svd", "total_time"]
    rows = []
    for seed, trace in runs.items():
        for e in trace:
            rows.append(
                {
                    "n_t": e.n_t,
                    "seed": "exact" if seed is None else seed,
                    "eps_0": e.ground_energy,
                    "exact_e0": e0,
                    "abs_error": abs(e.ground_energy - e0),
                    "n_svd": e.n_svd,
                    "total_time": e.total_time,
                }
            )
    tables = [Table("tfim_trace", cols, rows, [ENERGY_UNITS, f"propagation {propagation}, formulation {formulation}"])]
    traces = list(runs.values())
    if shots:
        band = []
        for i, entry in enumerate(traces[0]):
            vals = np.array([t[i].ground_energy for t in traces])
            finite = vals[np.isfinite(vals)]
            band.append(
                {
                    "n_t": entry.n_t,
                    "mean_eps_0": float(finite.mean()) if finite.size else math.nan,
                    "std_eps_0": float(finite.std(ddof=1)) if finite.size > 1 else 0.0,
                    "exact_e0": e0,
                    "n_seeds": int(finite.size),
                }
            )
        tables.append(
            Table("tfim_band", ["n_t", "mean_eps_0", "std_eps_0", "exact_e0", "n_seeds"], band,
                  [f"{shots} shots per Hadamard-test register"], ("n_t", ["mean_eps_0", "exact_e0"], False))
        )
    else:
        tables[0].plot = ("n_t", ["eps_0", "exact_e0"], False)
    final = traces[0][-1]
    summary = {"exact_e0": e0, "final_eps_0": final.ground_energy, "final_abs_error": abs(final.ground_energy - e0)}
    config_snapshot = dict(
        n_sites=n_sites, j_coupling=j_coupling, h_field=h_field, dt=dt, n_t_max=n_t_max,
        shots=shots, s_sv=s_sv, reference=reference, propagation=propagation,
        formulation=formulation, stride=stride,
    )
    return ExperimentResult("tfim", config_snapshot, tables, summary, seeds)


def time_to_accuracy(trace: ConvergenceTrace, e0: float, target: float) -> dict:
    for e in trace:
        if abs(e.ground_energy - e0) < target:
            return {"n_t": e.n_t, "total_time": e.total_time, "cumulative_time": e.cumulative_time}
    return {"n_t": None, "total_time": math.inf, "cumulative_time": math.inf}


def cmd_timestep(
    hamiltonian="harmonic:0.75,16",
    reference: str = "boltzmann:1.0",
    dt0: float = 0.05,
    s_sv: float = DEFAULT_S_SV,
    n_t_budget: int = 60,
    max_rounds: int = 1,
    s_sv_list=(1e-3, 1e-2, 1e-1),
    target: float = CHEMICAL_ACCURACY,
    n_t_max: int = 200,
    min_plateau: int = 2,
) -> ExperimentResult:
    """Refine the time step, then the time to reach ``target`` for each threshold.

    The threshold sweep runs at the refined time step.
    """
    h = resolve_hamiltonian(hamiltonian)
    spec = _spectrum_or_none(h, DEFAULT_DENSE_CAP)
    e0 = _ground_energy(h, spec)
    psi0 = resolve_reference(reference, h, spec)
    final_dt, log = refine_time_step(
        h, psi0, dt0, s_sv, n_t_budget, max_rounds, spectrum=spec, min_plateau=min_plateau
    )
    rounds = Table("timestep_rounds", [*LOG_COLUMNS, "plateau_length_to_last"], log,
                   ["plateau lengths in steps of the round's dt"])
    prop = make_propagator(h, final_dt, spectrum=spec)
    rows = []
    for cut in s_sv_list:
        trace = convergence_trace(h, psi0, prop, SolverConfig(cut), n_t_max)
        rows.append({"s_sv": cut, "dt": final_dt, **time_to_accuracy(trace, e0, target)})
    sweep = Table(
        "timestep_time_to_accuracy",
        ["s_sv", "dt", "n_t", "total_time", "cumulative_time"],
        rows,
        [f"target accuracy {target:g} (pure number in the Hamiltonian's units)",
         "inf marks runs that never reached the target within n_t_max"],
        ("s_sv", ["total_time"], False),
    )
    summary = {"final_dt": final_dt, "rounds": len(log)}
    return ExperimentResult(
        "timestep",
        dict(hamiltonian=str(hamiltonian), reference=reference, dt0=dt0, s_sv=s_sv,
             n_t_budget=n_t_budget, max_rounds=max_rounds, s_sv_list=list(s_sv_list),
             target=target, n_t_max=n_t_max, min_plateau=min_plateau),
        [rounds, sweep],
        summary,
    )


def cmd_qpe_compare(
    n_sites: int = 4,
    j_coupling: float = 1.0,
    h_field: float = 2.0,
    dt: float = 0.05,
    n_t_max: int = 100,
    shots_list=(),
    s_sv_list=None,
    s_sv: float = DEFAULT_S_SV,
    eps_sweep=(1e-1, 1e-2, 1e-3, 1e-4),
    reference: str = "basis:0",
    seed: int = 0,
    stride: int = 1,
    trotter: bool = True,
) -> ExperimentResult:
    """Accuracy-versus-time curves and the resource-formula sweep."""
    h = build_tfim(n_sites, j_coupling, h_field)
    spec = diagonalize(h)
    psi0 = resolve_reference(reference, h, spec)
    values = _strided(n_t_max, stride)
    rows = idealized_accuracy_curves(
        h, psi0, dt, n_t_max, shots_list, s_sv=s_sv, shots_s_sv=s_sv_list, seed=seed,
        n_t_values=values, spectrum=spec, trotter=trotter,
    )
    curves = Table("qpe_curves", list(CURVE_COLUMNS), rows,
                   [ENERGY_UNITS, "index is N_T for VQPE rows and the ancilla count m for QPE rows"],
                   ("total_time", ["abs_error"], True, "method"))
    min_overlap = float(np.abs(spec.to_eigenbasis(psi0)[0]) ** 2)
    gen = measure_overlap_generator(make_propagator(h, dt, spectrum=spec), psi0, n_t_max)
    lam = np.linalg.eigvalsh(assemble_s(gen, n_t_max))
    kept = lam[lam > s_sv]
    s_inv = float(1 / kept.min()) if kept.size else math.inf
    res_rows = []
    for eps in eps_sweep:
        q = qpe_resources(eps, h, max(min_overlap, 1e-300))
        v = vqpe_resources(eps, h, max(n_t_max, 1), max(n_t_max, 1) * dt, s_inv)
        res_rows.append(
            {
                "eps": eps,
                "m_ancillae": q.m_ancillae,
                "trotter_step": q.trotter_step,
                "n_exp_qpe": q.n_exp_qpe,
                "n_exp_vqpe_s": v.n_exp_vqpe_s,
                "n_exp_vqpe_h": v.n_exp_vqpe_h,
                "n_exp_vqpe_total": v.n_exp_vqpe_total,
                "min_overlap": min_overlap,
                "s_inv_norm": s_inv,
                "n_t": n_t_max,
                "gamma": q.gamma,
            }
        )
    resources = Table(
        "qpe_resources",
        ["eps", "m_ancillae", "trotter_step", "n_exp_qpe", "n_exp_vqpe_s", "n_exp_vqpe_h",
         "n_exp_vqpe_total", "min_overlap", "s_inv_norm", "n_t", "gamma"],
        res_rows,
        ["order-of-magnitude estimates: unit constants, logarithmic factors dropped"],
        ("eps", ["n_exp_qpe", "n_exp_vqpe_total"], True),
    )
    config = dict(n_sites=n_sites, j_coupling=j_coupling, h_field=h_field, dt=dt,
                  n_t_max=n_t_max, shots_list=list(shots_list),
                  s_sv_list=None if s_sv_list is None else list(s_sv_list), s_sv=s_sv,
                  eps_sweep=list(eps_sweep), reference=reference, stride=stride, trotter=trotter)
    return ExperimentResult("qpe-compare", config, [curves, resources],
                            {"exact_e0": spec.ground_energy, "min_overlap": min_overlap},
                            [seed] if shots_list else [])


def cmd_support(hamiltonian="harmonic:0.75,16", reference: str = "boltzmann:1.0",
                threshold: float = 1e-6) -> ExperimentResult:
    """Reference-state weights on the Hamiltonian eigenstates, sorted descending."""
    h = resolve_hamiltonian(hamiltonian)
    spec = diagonalize(h)
    psi0 = resolve_reference(reference, h, spec)
    sup = support_space(psi0, spec, threshold)
    rows = [
        {"rank": r, "level": n, "energy": float(spec.energies[n]), "weight": w}
        for r, (n, w) in enumerate(sup.entries)
    ]
    table = Table("support", ["rank", "level", "energy", "weight"], rows,
                  [f"weights above {threshold:g}; Q = {sup.q}"], ("rank", ["weight"], True))
    summary = {"q": sup.q, "ground_weight": float(sup.all_weights[0])}
    return ExperimentResult(
        "support", dict(hamiltonian=str(hamiltonian), reference=reference, threshold=threshold),
        [table], summary,
    )


# -- output -------------------------------------------------------------------


def write_result(result: ExperimentResult, out_dir: Path, argv=None, plot: bool = False,
                 started: float | None = None) -> list[Path]:
    """Write every table as CSV plus one manifest (and PNGs with ``plot``)."""
    out_dir = Path(out_dir)
    written = [write_csv(out_dir / f"{t.name}.csv", t.columns, t.rows, t.comments) for t in result.tables]
    if plot:
        # matplotlib is only imported when figures are requested
        from .plotting import plot_table

        for t in result.tables:
            if t.plot is not None:
                written.append(plot_table(t, out_dir / f"{t.name}.png"))
    manifest = {
        "command": result.command,
        "argv": list(sys.argv if argv is None else argv),
        "config": result.config,
        "seeds": result.seeds,
        "version": __version__,
        "wall_clock_seconds": None if started is None else time.monotonic() - started,
        "outputs": [p.name for p in written],
        "summary": result.summary,
    }
    written.append(write_json(out_dir / f"{result.command}_manifest.json", _jsonable(manifest)))
    return written


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
