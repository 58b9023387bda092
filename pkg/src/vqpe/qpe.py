"""Resource estimates for phase estimation versus VQPE.

The cubic symmetric-Trotter error coefficient ``Gamma`` is obtained by
enumerating nested Pauli commutators; the cost formulas are asymptotic
bounds evaluated with unit constants and no logarithmic factors, so every
report carries an order-of-magnitude flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import InvalidArgumentError
from .evolution import trotter1_step
from .hamiltonian import PauliSumHamiltonian, Spectrum, diagonalize, to_dense
from .krylov import SolverConfig
from .noise import NoiseSpec
from .pauli import nested_commutator_nonzero
from .trace import convergence_trace, make_propagator

ORDER_OF_MAGNITUDE = "order-of-magnitude"


@dataclass(frozen=True)
class TrotterBound:
    gamma: float
    triple_count: int
    alpha_one_norm: float

    @property
    def gamma_cubed(self) -> float:
        return self.gamma**3


@dataclass
class QpeCostReport:
    m_ancillae: int | None = None
    trotter_step: float | None = None
    n_exp_per_run: float | None = None
    n_exp_qpe: float | None = None
    n_exp_vqpe_s: float | None = None
    n_exp_vqpe_h: float | None = None
    n_exp_vqpe_total: float | None = None
    min_overlap: float | None = None
    s_inv_norm: float | None = None
    n_t: int | None = None
    gamma: float | None = None
    flags: list[str] = field(default_factory=lambda: [ORDER_OF_MAGNITUDE])


def holevo_uncertainty(m: int) -> float:
    """Heisenberg-limited phase uncertainty ``pi / 2^(m+1)`` of ``m`` ancillae."""
    if int(m) != m or m < 1:
        raise InvalidArgumentError(f"m must be a positive integer, got {m}")
    return math.pi / 2 ** (int(m) + 1)


def triple_in_support(strings, q: int, p: int, j: int) -> bool:
    """Whether ``[P_q, [P_p, P_j]]`` is nonzero."""
    return nested_commutator_nonzero(strings[q], strings[p], strings[j])


def gamma_bound(h: PauliSumHamiltonian) -> TrotterBound:
    """``Gamma^3 = 2/3 sum_{j, p>j, q>j} |a_p a_q a_j| [q,p,j]
    + 1/3 sum_{j, p>j} |a_p a_j^2| [j,p,j]``, Pauli brackets as indicators."""
    a = np.abs(h.coefficients)
    strings = h.strings
    m = len(strings)
    cube, count = 0.0, 0
    for j in range(m):
        for p in range(j + 1, m):
            if strings[p].commutes_with(strings[j]):
                continue  # the inner commutator already vanishes
            for q in range(j + 1, m):
                if triple_in_support(strings, q, p, j):
                    cube += (2 / 3) * a[p] * a[q] * a[j]
                    count += 1
            if triple_in_support(strings, j, p, j):
                cube += (1 / 3) * a[p] * a[j] ** 2
                count += 1
    return TrotterBound(float(np.cbrt(cube)), count, h.one_norm)


# -- dense unitaries (validation and Trotter floors) --------------------------


def exact_unitary(h: PauliSumHamiltonian, t: float) -> np.ndarray:
    return expm(-1j * t * to_dense(h).entries)


def trotter_unitary(h: PauliSumHamiltonian, dt: float) -> np.ndarray:
    """Dense first-order Trotter step, identical to ``trotter1_step`` column by column."""
    eye = np.eye(h.dimension, dtype=complex)
    return np.column_stack([trotter1_step(h, eye[:, k], dt) for k in range(h.dimension)])


def symmetric_trotter_unitary(h: PauliSumHamiltonian, t: float) -> np.ndarray:
    """``prod_{j=1..M} e^{-i a_j P_j t/2} prod_{j=M..1} e^{-i a_j P_j t/2}``."""
    dim = h.dimension
    factors = [
        math.cos(c * t / 2) * np.eye(dim) - 1j * math.sin(c * t / 2) * s.to_matrix()
        for c, s in h.terms
    ]
    u = np.eye(dim, dtype=complex)
    for f in factors:
        u = u @ f
    for f in reversed(factors):
        u = u @ f
    return u


def trotter_ground_energy(h: PauliSumHamiltonian, dt: float, spectrum: Spectrum | None = None) -> float:
    """Energy ``-arg(lambda)/dt`` of the Trotter eigenvector closest to the exact ground state."""
    spectrum = spectrum or diagonalize(h)
    mu, v = np.linalg.eig(trotter_unitary(h, dt))
    ground = spectrum.eigenvectors[:, 0]
    overlaps = np.abs(v.conj().T @ ground) / np.linalg.norm(v, axis=0)
    k = int(np.argmax(overlaps))
    return float(-np.angle(mu[k]) / dt)


# -- cost formulas ------------------------------------------------------------


def qpe_resources(
    eps: float,
    h: PauliSumHamiltonian,
    min_overlap: float,
    gamma: float | None = None,
) -> QpeCostReport:
    """Ancillae, Trotter step and exponential counts for phase estimation to accuracy ``eps``.

    ``t = Gamma^(-3/2) sqrt(eps / (2 sqrt2 pi))``,
    ``m = ceil(-1/2 + log2(2 pi / (eps t)))`` (at least 1),
    per run ``2 M (2 sqrt2 pi Gamma / eps)^(3/2)`` exponentials, divided by
    ``min_overlap`` for the repetitions needed to hit the target state.
    """
    if not eps > 0:
        raise InvalidArgumentError("eps must be positive")
    if not 0 < min_overlap <= 1:
        raise InvalidArgumentError("min_overlap must lie in (0, 1]")
    g = gamma_bound(h).gamma if gamma is None else float(gamma)
    n_terms = h.n_terms
    report = QpeCostReport(min_overlap=min_overlap, gamma=g)
    if g == 0:
        t = 1.0
        report.flags.append("commuting Hamiltonian: Trotter step unbounded, t = 1 convention")
    else:
        t = g ** (-1.5) * math.sqrt(eps / (2 * math.sqrt(2) * math.pi))
    m = math.ceil(-0.5 + math.log2(2 * math.pi / (eps * t)))
    if m < 1:
        report.flags.append(f"ancilla count {m} clamped to 1")
        m = 1
    if g == 0:
        # one product of M commuting exponentials per unit of controlled time
        per_run = n_terms * 2.0**m
    else:
        per_run = 2 * n_terms * (2 * math.sqrt(2) * math.pi * g / eps) ** 1.5
    report.m_ancillae = m
    report.trotter_step = t
    report.n_exp_per_run = per_run
    report.n_exp_qpe = per_run / min_overlap
    return report


def vqpe_resources(
    eps: float,
    h: PauliSumHamiltonian,
    n_t: int,
    t_max: float,
    s_inv_norm: float,
    gamma: float | None = None,
    alpha_one_norm: float | None = None,
) -> QpeCostReport:
    """Exponential counts for the overlap matrix, the Hamiltonian matrix and
    the eigenvalues, with ``||H|| <= sum |a_j|``:

    ``N_S = N_T^(9/2) M (Gamma t_max)^(3/2) / eps^(5/2)``
    ``N_H = N_S (sum |a_j|)^2``
    ``N_total = M (N_T sum |a_j|)^(9/2) ||S^-1||^5 (Gamma t_max)^(3/2) / eps^(5/2)``
    """
    if not (eps > 0 and n_t > 0 and t_max > 0 and s_inv_norm > 0):
        raise InvalidArgumentError("eps, n_t, t_max and s_inv_norm must be positive")
    g = gamma_bound(h).gamma if gamma is None else float(gamma)
    a1 = h.one_norm if alpha_one_norm is None else float(alpha_one_norm)
    n_terms = h.n_terms
    gt = (g * t_max) ** 1.5
    n_s = n_t**4.5 * n_terms * gt / eps**2.5
    return QpeCostReport(
        n_exp_vqpe_s=n_s,
        n_exp_vqpe_h=n_s * a1**2,
        n_exp_vqpe_total=n_terms * (n_t * a1) ** 4.5 * s_inv_norm**5 * gt / eps**2.5,
        s_inv_norm=s_inv_norm,
        n_t=n_t,
        gamma=g,
    )


# -- accuracy curves ----------------------------------------------------------

CURVE_COLUMNS = ("method", "index", "max_time", "total_time", "abs_error")


def qpe_model_rows(dt: float, m_max: int, floor: float = 0.0, method: str = "qpe") -> list[dict]:
    """Heisenberg-limited QPE: error ``pi / (2^(m+1) dt)`` with ``2^m`` steps of ``dt``."""
    rows = []
    for m in range(1, m_max + 1):
        err = holevo_uncertainty(m) / dt
        rows.append(
            {
                "method": method,
                "index": m,
                "max_time": 2 ** (m - 1) * dt,
                "total_time": 2**m * dt,
                "abs_error": math.hypot(err, floor),
            }
        )
    return rows


def _trace_rows(trace, e0: float, method: str) -> list[dict]:
    return [
        {
            "method": method,
            "index": e.n_t,
            "max_time": e.total_time,
            "total_time": e.cumulative_time,
            "abs_error": abs(e.ground_energy - e0),
        }
        for e in trace
    ]


def idealized_accuracy_curves(
    h: PauliSumHamiltonian,
    psi0: np.ndarray,
    dt: float,
    n_t_max: int,
    shots_list=(),
    *,
    s_sv: float = 1e-1,
    shots_s_sv=None,
    trotter_s_sv: float = 1e-5,
    seed: int = 0,
    n_t_values=None,
    m_max: int | None = None,
    spectrum: Spectrum | None = None,
    trotter: bool = True,
) -> list[dict]:
    """Ground-energy error against maximal and total evolution time per method.

    Methods: ``vqpe_exact`` (exact evolution, Hermitian solve),
    ``vqpe_trotter`` (first-order Trotter, unitary solve), ``vqpe_shots_<M>``
    (exact evolution with every generator sample and Hamiltonian-term overlap
    drawn from ``M`` Hadamard-test shots), ``qpe`` (Heisenberg model) and
    ``qpe_trotter`` (the model combined with the Trotter eigenphase shift).
    """
    spectrum = spectrum or diagonalize(h)
    e0 = spectrum.ground_energy
    m_max = m_max or max(1, math.ceil(math.log2(max(n_t_max, 1)))) + 10
    prop = make_propagator(h, dt, spectrum=spectrum)
    rows = _trace_rows(
        convergence_trace(h, psi0, prop, SolverConfig(s_sv), n_t_max, n_t_values=n_t_values),
        e0,
        "vqpe_exact",
    )
    shots_s_sv = list(shots_s_sv) if shots_s_sv is not None else [s_sv] * len(shots_list)
    if len(shots_s_sv) != len(shots_list):
        raise InvalidArgumentError("shots_s_sv needs one threshold per shots value")
    for shots, cut in zip(shots_list, shots_s_sv):
        noise = NoiseSpec("shots", shots=int(shots), seed=seed)
        trace = convergence_trace(
            h, psi0, prop, SolverConfig(cut), n_t_max, n_t_values=n_t_values, noise=noise
        )
        rows += _trace_rows(trace, e0, f"vqpe_shots_{int(shots)}")
    rows += qpe_model_rows(dt, m_max)
    if trotter:
        trot = make_propagator(h, dt, "trotter1")
        config = SolverConfig(trotter_s_sv, "unitary", dt)
        trace = convergence_trace(h, psi0, trot, config, n_t_max, n_t_values=n_t_values)
        rows += _trace_rows(trace, e0, "vqpe_trotter")
        floor = abs(trotter_ground_energy(h, dt, spectrum) - e0)
        rows += qpe_model_rows(dt, m_max, floor, "qpe_trotter")
    return rows
