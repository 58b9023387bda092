"""Energy estimates as a function of the number of expansion states.

One generator (or one stored state sequence) is measured up to ``n_t_max``
and every prefix ``N_T = 0, 1, ...`` is solved from it, as an experiment
accumulating data step by step would.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError, DegenerateProblemError, InvalidArgumentError
from .evolution import Propagator, evolved_sequence
from .hamiltonian import (
    DEFAULT_DENSE_CAP,
    DiagonalHamiltonian,
    Hamiltonian,
    Spectrum,
    diagonalize,
)
from .krylov import (
    OverlapGenerator,
    SolverConfig,
    assemble_h_from_generator,
    assemble_h_full,
    assemble_s,
    assemble_u,
    measure_overlap_generator,
    solve_gevp,
    solve_unitary_gevp,
)
from .noise import (
    TAG_H,
    TAG_S,
    TAG_TERM,
    TAG_U,
    NoiseSpec,
    element_noise,
    perturb_overlap_generator,
    sample_generator,
)


@dataclass
class TraceEntry:
    n_t: int
    eigenvalues: np.ndarray
    n_svd: int
    condition_number: float
    singular_values: np.ndarray
    total_time: float
    cumulative_time: float
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else float("nan")

    def energy(self, k: int) -> float:
        return float(self.eigenvalues[k]) if k < self.eigenvalues.size else float("nan")

    def singular_value(self, k: int) -> float:
        return float(self.singular_values[k]) if k < self.singular_values.size else float("nan")


@dataclass
class ConvergenceTrace:
    entries: list[TraceEntry]
    dt: float
    formulation: str

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> TraceEntry:
        return self.entries[i]

    @property
    def n_t(self) -> np.ndarray:
        return np.array([e.n_t for e in self.entries])

    @property
    def n_svd(self) -> np.ndarray:
        return np.array([e.n_svd for e in self.entries])

    @property
    def ground_energies(self) -> np.ndarray:
        return np.array([e.ground_energy for e in self.entries])

    def energies(self, k: int) -> np.ndarray:
        return np.array([e.energy(k) for e in self.entries])

    def singular_values(self, k: int) -> np.ndarray:
        return np.array([e.singular_value(k) for e in self.entries])

    @property
    def condition_numbers(self) -> np.ndarray:
        return np.array([e.condition_number for e in self.entries])


def make_propagator(
    h: Hamiltonian,
    dt: float,
    kind: str = "auto",
    spectrum: Spectrum | None = None,
    dense_cap: int = DEFAULT_DENSE_CAP,
) -> Propagator:
    """Pick a propagator for ``h``.

    ``auto`` uses eigenbasis phases when ``h`` is diagonal or a spectrum is at
    hand (or obtainable within ``dense_cap``), Lanczos otherwise.
    """
    if kind == "trotter1":
        return Propagator.trotter(h, dt)
    if kind == "lanczos":
        return Propagator.lanczos(h, dt)
    if kind not in ("auto", "exact_eigen"):
        raise InvalidArgumentError(f"unknown propagator kind {kind!r}")
    if spectrum is None and (
        kind == "exact_eigen" or isinstance(h, DiagonalHamiltonian) or h.dimension <= dense_cap
    ):
        spectrum = diagonalize(h, dense_cap)
    if spectrum is None:
        return Propagator.lanczos(h, dt)
    return Propagator.exact(spectrum, dt, h)


def _prefixes(n_t_max: int, n_t_values) -> list[int]:
    if n_t_values is None:
        return list(range(n_t_max + 1))
    values = sorted({int(n) for n in n_t_values})
    if values and (values[0] < 0 or values[-1] > n_t_max):
        raise InvalidArgumentError(f"n_t_values must lie in [0, {n_t_max}]")
    return values


def trace_from_generator(
    gen: OverlapGenerator,
    config: SolverConfig,
    n_t_max: int | None = None,
    *,
    n_t_values=None,
    h_matrix: np.ndarray | None = None,
    noise: NoiseSpec | None = None,
) -> ConvergenceTrace:
    """Solve every requested prefix of an already measured generator.

    ``h_matrix`` supplies a full (non-Toeplitz) Hamiltonian matrix for the
    Hermitian formulation; otherwise the generator's ``h(m)`` samples are
    used. ``noise`` in element mode perturbs each assembled matrix with one
    full-size draw sliced per prefix, so a prefix sees the same noise in every
    longer run; toeplitz mode perturbs the generator entries instead.
    """
    n_t_max = gen.n_t if n_t_max is None else n_t_max
    if n_t_max > gen.n_t:
        raise InvalidArgumentError(f"generator covers N_T <= {gen.n_t}, asked for {n_t_max}")
    dt = gen.dt if gen.dt is not None else config.dt
    hermitian = config.formulation == "hermitian"
    if hermitian and h_matrix is None and gen.h_values is None:
        raise InvalidArgumentError("the Hermitian formulation needs h(m) samples or a full H matrix")

    if noise is not None and noise.mode == "toeplitz":
        gen = perturb_overlap_generator(gen, noise)
    size = n_t_max + 1
    s_full = assemble_s(gen, n_t_max)
    if hermitian:
        second = h_matrix[:size, :size] if h_matrix is not None else assemble_h_from_generator(gen, n_t_max)
    else:
        second = assemble_u(gen, n_t_max)
    if noise is not None and noise.mode == "element" and noise.epsilon > 0:
        s_full = s_full + element_noise((size, size), noise.epsilon, noise.seed, TAG_S)
        tag = TAG_H if hermitian else TAG_U
        second = second + element_noise((size, size), noise.epsilon, noise.seed, tag)

    solve = solve_gevp if hermitian else solve_unitary_gevp
    entries = []
    for n in _prefixes(n_t_max, n_t_values):
        s_n, x_n = s_full[: n + 1, : n + 1], second[: n + 1, : n + 1]
        cumulative = dt * (n + 1) * (n + 2) / 2
        try:
            est = solve(x_n, s_n, config)
        except DegenerateProblemError as exc:
            lam = np.sort(np.linalg.eigvalsh(0.5 * (s_n + s_n.conj().T)))[::-1]
            entries.append(
                TraceEntry(n, np.array([]), 0, float("nan"), lam, n * dt, cumulative, [str(exc)])
            )
            continue
        entries.append(
            TraceEntry(
                n,
                est.eigenvalues,
                est.n_svd,
                est.condition_number,
                est.singular_values,
                n * dt,
                cumulative,
                est.diagnostics,
            )
        )
    return ConvergenceTrace(entries, dt, config.formulation)


def convergence_trace(
    h: Hamiltonian,
    psi0: np.ndarray,
    prop: Propagator,
    config: SolverConfig,
    n_t_max: int,
    *,
    n_t_values=None,
    noise: NoiseSpec | None = None,
) -> ConvergenceTrace:
    """Measure once up to ``n_t_max`` and solve each prefix.

    With a propagator that does not commute with ``H`` (Trotter) the
    Hermitian formulation builds the full Hamiltonian matrix from stored
    states; the unitary formulation only ever needs ``g(m)``.
    """
    if n_t_max < 0:
        raise InvalidArgumentError("n_t_max must be non-negative")
    hermitian = config.formulation == "hermitian"
    shots = noise is not None and noise.mode == "shots"
    h_matrix = None
    if hermitian and not prop.is_exact:
        if shots:
            raise ContractViolationError(
                "shot sampling of a non-Toeplitz Hamiltonian matrix is not modelled; "
                "use the unitary formulation with Trotterized evolution"
            )
        states = evolved_sequence(prop, psi0, n_t_max + 1)
        g = np.array([np.vdot(psi0, s) for s in states])
        gen = OverlapGenerator(g, n_t_max + 2, prop.dt)
        h_matrix = assemble_h_full(h, states[: n_t_max + 1])
    else:
        gen = measure_overlap_generator(prop, psi0, n_t_max, h if hermitian else None)
    if shots:
        gen = _sample(gen, h, psi0, prop, n_t_max, noise)
        noise = None
    return trace_from_generator(
        gen, config, n_t_max, n_t_values=n_t_values, h_matrix=h_matrix, noise=noise
    )


def _sample(gen: OverlapGenerator, h, psi0, prop: Propagator, n_t_max: int, noise: NoiseSpec):
    g = sample_generator(gen.values, noise.shots, noise.seed, TAG_S)
    if gen.h_values is None:
        return OverlapGenerator(g, gen.evaluation_count, gen.dt)
    # h(m) = sum_j alpha_j <P_j Psi0| U^m |Psi0>: one Hadamard test per term and lag
    terms = getattr(h, "terms", None)
    if terms is None:
        raise ContractViolationError("shot-sampled Hamiltonian samples need a Pauli-sum Hamiltonian")
    h_sampled = np.zeros_like(gen.values)
    phis = evolved_sequence(prop, psi0, n_t_max + 1)
    for j, (coeff, string) in enumerate(terms):
        left = string.apply(psi0)
        exact = np.array([np.vdot(left, phi) for phi in phis])
        h_sampled += coeff * sample_generator(exact, noise.shots, noise.seed, TAG_TERM + j)
    return OverlapGenerator(g, gen.evaluation_count, gen.dt, h_sampled)
