"""Toeplitz assembly of the VQPE matrices and SVD-regularized solvers.

On a linear grid ``t_j = j dt`` with a unitary single-step propagator ``U``,
every matrix element is a sample of the overlap generator

    g(m) = <Psi0| U^m |Psi0>,    m = 0 .. N_T + 1,

with ``S[j, k] = g(k - j)`` and ``U[j, k] = g(k - j + 1)`` (negative lags are
complex conjugates). ``N_T + 2`` inner products therefore determine both
matrices. For propagators commuting with ``H`` the Hamiltonian matrix is
Toeplitz as well, generated by ``h(m) = <Psi0| H U^m |Psi0>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import ArpackError, eigsh

from .errors import ContractViolationError, DegenerateProblemError, InvalidArgumentError
from .evolution import Propagator
from .hamiltonian import Hamiltonian, Spectrum


@dataclass(frozen=True)
class TimeGrid:
    """Either a linear grid ``t_j = j dt`` (``j = 0..n_t``) or explicit times."""

    kind: str
    dt: float | None = None
    n_t: int | None = None
    explicit_times: tuple[float, ...] | None = None

    @classmethod
    def linear(cls, dt: float, n_t: int) -> TimeGrid:
        if n_t < 0:
            raise InvalidArgumentError("n_t must be non-negative")
        return cls("linear", dt=float(dt), n_t=int(n_t))

    @classmethod
    def explicit(cls, times) -> TimeGrid:
        times = tuple(float(t) for t in times)
        if not times or times[0] != 0.0:
            raise InvalidArgumentError("explicit grids must start at t_0 = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidArgumentError("explicit grid times must be strictly increasing")
        return cls("explicit", n_t=len(times) - 1, explicit_times=times)

    @property
    def times(self) -> np.ndarray:
        if self.kind == "linear":
            return self.dt * np.arange(self.n_t + 1)
        return np.array(self.explicit_times)


@dataclass(frozen=True)
class OverlapGenerator:
    """Samples ``g(m)`` for ``m = 0..len-1`` and, optionally, ``h(m)``."""

    values: np.ndarray
    evaluation_count: int
    dt: float | None = None
    h_values: np.ndarray | None = None

    @property
    def n_t(self) -> int:
        """Largest N_T whose S and U matrices this generator covers."""
        return self.values.size - 2


@dataclass
class KrylovMatrices:
    s_matrix: np.ndarray
    h_matrix: np.ndarray | None = None
    u_matrix: np.ndarray | None = None
    toeplitz_flags: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SolverConfig:
    s_sv: float = 1e-1
    formulation: str = "hermitian"
    dt: float | None = None
    unitarity_bound: float = 1e-2

    def __post_init__(self):
        if not self.s_sv > 0:
            raise InvalidArgumentError(f"s_sv must be positive, got {self.s_sv}")
        if self.formulation not in ("hermitian", "unitary"):
            raise InvalidArgumentError(f"unknown formulation {self.formulation!r}")
        if self.formulation == "unitary" and not (self.dt and self.dt > 0):
            raise InvalidArgumentError("the unitary formulation needs dt > 0")


@dataclass
class SpectrumEstimate:
    """Result of a truncated secular-equation solve.

    ``singular_values`` are the eigenvalues of the (Hermitized) overlap
    matrix in descending order; they coincide with its singular values as
    long as noise leaves it positive semidefinite.
    """

    eigenvalues: np.ndarray
    coefficients: np.ndarray
    singular_values: np.ndarray
    n_svd: int
    condition_number: float
    formulation: str
    lambda_moduli: np.ndarray | None = None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def to_json(self) -> dict:
        out = {
            "eigenvalues": self.eigenvalues.tolist(),
            "singular_values": self.singular_values.tolist(),
            "n_svd": int(self.n_svd),
            "condition_number": _json_float(self.condition_number),
            "formulation": self.formulation,
        }
        if self.formulation == "unitary":
            out["lambda_moduli"] = self.lambda_moduli.tolist()
        return out


def _json_float(x: float):
    return x if math.isfinite(x) else str(x)


# -- generators ---------------------------------------------------------------


def measure_overlap_generator(
    prop: Propagator,
    psi0: np.ndarray,
    n_t: int,
    hamiltonian: Hamiltonian | None = None,
) -> OverlapGenerator:
    """Measure ``g(0..n_t+1)`` from a single running evolved state.

    With ``hamiltonian`` given, also records ``h(m) = <H Psi0 | U^m Psi0>``
    (for a Toeplitz Hamiltonian matrix; only meaningful for exact propagators).
    """
    if n_t < 0:
        raise InvalidArgumentError("n_t must be non-negative")
    phi = psi0.astype(complex, copy=True)
    h_psi0 = hamiltonian.matvec(psi0) if hamiltonian is not None else None
    g = np.empty(n_t + 2, dtype=complex)
    h = np.empty(n_t + 2, dtype=complex) if h_psi0 is not None else None
    for m in range(n_t + 2):
        g[m] = np.vdot(psi0, phi)
        if h is not None:
            h[m] = np.vdot(h_psi0, phi)
        if m < n_t + 1:
            phi = prop.apply(phi)
    return OverlapGenerator(g, n_t + 2, prop.dt, h)


def spectral_generator(spectrum: Spectrum, psi0: np.ndarray, dt: float, n_t: int) -> OverlapGenerator:
    """Closed-form generators ``g(m) = sum_N |psi_N|^2 exp(-i E_N m dt)`` and
    ``h(m) = sum_N E_N |psi_N|^2 exp(-i E_N m dt)``."""
    w = np.abs(spectrum.to_eigenbasis(psi0)) ** 2
    phases = np.exp(-1j * np.outer(dt * np.arange(n_t + 2), spectrum.energies))
    return OverlapGenerator(phases @ w, n_t + 2, dt, phases @ (spectrum.energies * w))


# -- assembly -----------------------------------------------------------------


def toeplitz_from_generator(values: np.ndarray, size: int, offset: int = 0) -> np.ndarray:
    """Matrix ``M[j, k] = g(k - j + offset)`` with ``g(-m) = conj(g(m))``."""
    lag = np.arange(size)[None, :] - np.arange(size)[:, None] + offset
    need = int(np.max(np.abs(lag))) if size else 0
    if need >= len(values):
        raise InvalidArgumentError(
            f"generator of length {len(values)} does not cover lag {need}"
        )
    return np.where(lag >= 0, values[np.abs(lag)], np.conj(values[np.abs(lag)]))


def assemble_s(gen: OverlapGenerator | np.ndarray, n_t: int) -> np.ndarray:
    values = gen.values if isinstance(gen, OverlapGenerator) else np.asarray(gen)
    return toeplitz_from_generator(values, n_t + 1)


def assemble_u(gen: OverlapGenerator | np.ndarray, n_t: int) -> np.ndarray:
    values = gen.values if isinstance(gen, OverlapGenerator) else np.asarray(gen)
    return toeplitz_from_generator(values, n_t + 1, offset=1)


def assemble_h_from_generator(gen: OverlapGenerator, n_t: int) -> np.ndarray:
    if gen.h_values is None:
        raise InvalidArgumentError("generator carries no Hamiltonian samples")
    return toeplitz_from_generator(gen.h_values, n_t + 1)


def assemble_h_toeplitz(
    spectrum: Spectrum,
    psi0: np.ndarray,
    grid: TimeGrid,
    propagator: Propagator | None = None,
) -> np.ndarray:
    """``H[j, k] = sum_N E_N |psi_N|^2 exp(-i E_N (k - j) dt)``.

    Only valid when the time evolution commutes with H; passing a Trotter
    propagator is rejected.
    """
    if propagator is not None and not propagator.is_exact:
        raise ContractViolationError(
            "the Hamiltonian matrix is not Toeplitz under Trotterized evolution; "
            "use assemble_h_full on the evolved states instead"
        )
    if grid.kind != "linear":
        raise ContractViolationError("Toeplitz assembly needs a linear time grid")
    gen = spectral_generator(spectrum, psi0, grid.dt, grid.n_t)
    return assemble_h_from_generator(gen, grid.n_t)


def assemble_h_full(h: Hamiltonian, states) -> np.ndarray:
    """All ``<Phi_j|H|Phi_k>``; the upper triangle is mirrored to enforce Hermiticity."""
    phi = np.column_stack(states)
    g = phi.conj().T @ np.column_stack([h.matvec(s) for s in states])
    upper = np.triu(g)
    return upper + np.triu(g, 1).conj().T


def gram_matrix(states, operator=None) -> np.ndarray:
    """Brute-force ``<Phi_j| A |Phi_k>`` (identity when ``operator`` is None)."""
    phi = np.column_stack(states)
    right = phi if operator is None else np.column_stack([operator(s) for s in states])
    return phi.conj().T @ right


def is_toeplitz(m: np.ndarray, tol: float = 1e-12) -> bool:
    return toeplitz_deviation(m) <= tol


def toeplitz_deviation(m: np.ndarray) -> float:
    if m.shape[0] < 2:
        return 0.0
    return float(np.max(np.abs(m[1:, 1:] - m[:-1, :-1])))


# -- solvers ------------------------------------------------------------------


def condition_number(s_matrix: np.ndarray) -> float:
    """``sigma_max / sigma_min`` over all singular values; inf when singular."""
    return _condition_from_spectrum(np.linalg.svd(s_matrix, compute_uv=False))


def _condition_from_spectrum(values: np.ndarray) -> float:
    sv = np.abs(values)
    if sv.size == 0:
        return math.inf
    hi, lo = sv.max(), sv.min()
    if hi == 0 or lo <= hi * sv.size * np.finfo(float).eps:
        return math.inf
    return float(hi / lo)


# Above this size, with few retained directions, Lanczos on the top
# eigenpairs beats a full dense eigendecomposition several times over.
_PARTIAL_MIN_DIM = 96


def _top_eigenvectors(s_h: np.ndarray, lam: np.ndarray, r: int) -> np.ndarray:
    """Eigenvectors for the ``r`` largest eigenvalues, ordered like ``lam[:r]``."""
    n = lam.size
    if n >= _PARTIAL_MIN_DIM and 4 * r <= n:
        v0 = np.random.default_rng(n).standard_normal(n).astype(complex)
        try:
            vals, vecs = eigsh(s_h, k=r, which="LA", tol=0, v0=v0)
        except ArpackError:
            vals = None
        if vals is not None:
            order = np.argsort(vals)[::-1]
            vals, vecs = vals[order], vecs[:, order]
            scale = max(abs(lam[0]), 1.0)
            resid = np.linalg.norm(s_h @ vecs - vecs * vals, axis=0).max()
            if np.abs(vals - lam[:r]).max() < 1e-9 * scale and resid < 1e-8 * scale:
                return vecs
    _, w = np.linalg.eigh(s_h)
    return w[:, ::-1][:, :r]


def _truncated_basis(s_matrix: np.ndarray, s_sv: float):
    s_h = 0.5 * (s_matrix + s_matrix.conj().T)
    lam = np.linalg.eigvalsh(s_h)[::-1]
    n_svd = int((lam > s_sv).sum())
    if n_svd == 0:
        raise DegenerateProblemError(
            f"no overlap singular value exceeds s_sv={s_sv:g} (largest {lam[0]:.3e})"
        )
    w = _top_eigenvectors(s_h, lam, n_svd)
    x = w / np.sqrt(lam[:n_svd])
    return x, lam, n_svd, _condition_from_spectrum(lam)


def _check_square(*mats):
    n = mats[0].shape[0]
    for m in mats:
        if m.ndim != 2 or m.shape != (n, n):
            raise InvalidArgumentError("matrices must be square and of equal size")


def solve_gevp(h_matrix: np.ndarray, s_matrix: np.ndarray, config: SolverConfig) -> SpectrumEstimate:
    """Solve ``H c = eps S c`` in the span of overlap eigenvectors above ``s_sv``."""
    _check_square(h_matrix, s_matrix)
    x, lam, n_svd, cond = _truncated_basis(s_matrix, config.s_sv)
    h_t = x.conj().T @ h_matrix @ x
    h_t = 0.5 * (h_t + h_t.conj().T)
    eps, c = np.linalg.eigh(h_t)
    return SpectrumEstimate(eps, c, lam, n_svd, cond, "hermitian")


def solve_unitary_gevp(u_matrix: np.ndarray, s_matrix: np.ndarray, config: SolverConfig) -> SpectrumEstimate:
    """Solve ``U c = exp(-i eps dt) S c`` and map eigenphases to energies.

    Energies lie in ``[-pi/dt, pi/dt)``; levels with ``|E| dt > pi`` come back
    as their aliased images ``E - 2 pi k / dt``.
    """
    _check_square(u_matrix, s_matrix)
    if not (config.dt and config.dt > 0):
        raise InvalidArgumentError("the unitary formulation needs dt > 0")
    x, lam, n_svd, cond = _truncated_basis(s_matrix, config.s_sv)
    u_t = x.conj().T @ u_matrix @ x
    mu, c = np.linalg.eig(u_t)
    eps = -np.angle(mu) / config.dt
    order = np.argsort(eps, kind="stable")
    eps, mu, c = eps[order], mu[order], c[:, order]
    moduli = np.abs(mu)
    diagnostics = [
        f"|lambda_{i}| = {m:.6f} deviates from 1 by more than {config.unitarity_bound:g}"
        for i, m in enumerate(moduli)
        if abs(m - 1) > config.unitarity_bound
    ]
    return SpectrumEstimate(eps, c, lam, n_svd, cond, "unitary", moduli, diagnostics)


def solve(matrices: KrylovMatrices, config: SolverConfig) -> SpectrumEstimate:
    if config.formulation == "unitary":
        return solve_unitary_gevp(matrices.u_matrix, matrices.s_matrix, config)
    return solve_gevp(matrices.h_matrix, matrices.s_matrix, config)


def relative_error(estimate, exact) -> np.ndarray:
    """``|eps - E| / max(|E|, 1)``, elementwise."""
    estimate = np.asarray(estimate, dtype=float)
    exact = np.asarray(exact, dtype=float)
    return np.abs(estimate - exact) / np.maximum(np.abs(exact), 1.0)
