"""Noise injection and shot-limited Hadamard-test sampling.

Every random number is drawn from a Philox stream keyed by the run seed plus
the integer coordinates of what is being perturbed (matrix tag, lag or
diagonal offset, register), so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .krylov import OverlapGenerator, measure_overlap_generator, toeplitz_deviation

MODES = ("element", "toeplitz", "shots")

# matrix tags keep the S, H and U noise streams independent
TAG_S, TAG_H, TAG_U = 0, 1, 2
# per-Pauli-term Hamiltonian samples use TAG_TERM + term index
TAG_TERM = 16
# registers: real (X measurement) and imaginary (Y measurement) parts
REAL, IMAG = 0, 1


@dataclass(frozen=True)
class NoiseSpec:
    mode: str = "element"
    epsilon: float = 0.0
    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgumentError(f"unknown noise mode {self.mode!r}; expected one of {MODES}")
        if not self.epsilon >= 0:
            raise InvalidArgumentError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.mode == "shots" and (self.shots is None or self.shots < 1):
            raise InvalidArgumentError("shots mode needs shots >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class HadamardEstimate:
    value: complex
    shots_used: int
    stderr: float


def keyed_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for the coordinate ``keys`` under ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


# -- Gaussian noise -----------------------------------------------------------


def element_noise(shape: tuple[int, int], epsilon: float, seed: int, tag: int = TAG_S) -> np.ndarray:
    """Complex noise ``N(0, eps) + i N(0, eps)`` for every element.

    Entries with ``max(j, k) = m`` come from one stream keyed by ``m``, so the
    leading ``n x n`` block is the same whatever the full size.
    """
    rows, cols = shape
    out = np.empty(shape, dtype=complex)
    for m in range(max(rows, cols)):
        # shell m: row m up to the diagonal, then column m above it
        re = keyed_rng(seed, tag, m, REAL).normal(0.0, epsilon, 2 * m + 1)
        im = keyed_rng(seed, tag, m, IMAG).normal(0.0, epsilon, 2 * m + 1)
        z = re + 1j * im
        if m < rows:
            out[m, : min(m + 1, cols)] = z[: min(m + 1, cols)]
        if m < cols:
            out[: min(m, rows), m] = z[m + 1 : m + 1 + min(m, rows)]
    return out


def _lag_noise(n: int, epsilon: float, seed: int, tag: int, start: int = 0) -> np.ndarray:
    out = np.empty(n, dtype=complex)
    for i in range(n):
        lag = start + i
        re = keyed_rng(seed, tag, lag, REAL).normal(0.0, epsilon)
        im = keyed_rng(seed, tag, lag, IMAG).normal(0.0, epsilon)
        out[i] = complex(re, im)
    return out


def perturb_generator(values: np.ndarray, epsilon: float, seed: int, tag: int = TAG_S) -> np.ndarray:
    """Add independent per-quadrature ``N(0, eps)`` noise to each ``g(m)``.

    Entry ``m`` always receives the same draw regardless of how many lags are
    perturbed, so longer runs extend rather than reshuffle the noise.
    """
    values = np.asarray(values, dtype=complex)
    if epsilon == 0:
        return values.copy()
    return values + _lag_noise(values.size, epsilon, seed, tag)


def perturb_overlap_generator(gen: OverlapGenerator, spec: NoiseSpec) -> OverlapGenerator:
    if spec.mode != "toeplitz":
        raise InvalidArgumentError("generator perturbation is the toeplitz noise mode")
    g = perturb_generator(gen.values, spec.epsilon, spec.seed, TAG_S)
    h = None
    if gen.h_values is not None:
        h = perturb_generator(gen.h_values, spec.epsilon, spec.seed, TAG_H)
    return OverlapGenerator(g, gen.evaluation_count, gen.dt, h)


def perturb(matrix: np.ndarray, spec: NoiseSpec, tag: int = TAG_S) -> np.ndarray:
    """Gaussian perturbation of an assembled matrix.

    ``element``: independent noise on every element; Hermiticity is not
    restored (the solvers Hermitize). ``toeplitz``: one draw per diagonal
    offset, so the result stays Toeplitz; for a Hermitian input the negative
    offsets get the conjugate draw and the result stays Hermitian too.
    """
    m = np.asarray(matrix, dtype=complex)
    if spec.mode == "shots":
        raise InvalidArgumentError("shots noise applies to generators, not matrices")
    if spec.epsilon == 0:
        return m.copy()
    n = m.shape[0]
    if spec.mode == "element":
        return m + element_noise(m.shape, spec.epsilon, spec.seed, tag)
    if n and toeplitz_deviation(m) > 1e-12:
        raise InvalidArgumentError("toeplitz-mode noise needs a Toeplitz matrix")
    offset = np.arange(n)[None, :] - np.arange(n)[:, None]
    hermitian = np.allclose(m, m.conj().T, rtol=0, atol=1e-12)
    upper = _lag_noise(n, spec.epsilon, spec.seed, tag)
    if hermitian:
        upper[0] = upper[0].real  # the main diagonal of a Hermitian matrix is real
        noise = np.where(offset >= 0, upper[np.abs(offset)], np.conj(upper[np.abs(offset)]))
    else:
        # offsets -1, -2, ... get their own streams, shifted past the positive ones
        lower = _lag_noise(n, spec.epsilon, spec.seed, tag, start=n)
        noise = np.where(offset >= 0, upper[np.abs(offset)], lower[np.abs(offset)])
    return m + noise


# -- shot noise ---------------------------------------------------------------


def hadamard_test(g_true: complex, shots: int, seed: int, key: tuple[int, ...] = ()) -> HadamardEstimate:
    """Sample the X and Y ancilla registers of a Hadamard test.

    Each register yields ``shots`` outcomes of +-1 with ``P(+1) = (1 + Re g)/2``
    (X) and ``(1 + Im g)/2`` (Y); the estimate is ``<X> + i <Y>``.
    """
    if shots < 1:
        raise InvalidArgumentError("shots must be at least 1")
    g = complex(g_true)
    tol = 1e-12
    if abs(g.real) > 1 + tol or abs(g.imag) > 1 + tol:
        raise InvalidArgumentError(f"overlap {g} outside the unit square")
    p_x = min(max((1 + g.real) / 2, 0.0), 1.0)
    p_y = min(max((1 + g.imag) / 2, 0.0), 1.0)
    n_x = keyed_rng(seed, *key, REAL).binomial(shots, p_x)
    n_y = keyed_rng(seed, *key, IMAG).binomial(shots, p_y)
    mx = (2 * n_x - shots) / shots
    my = (2 * n_y - shots) / shots
    stderr = math.sqrt((1 - mx**2) / shots + (1 - my**2) / shots) / math.sqrt(2)
    return HadamardEstimate(complex(mx, my), shots, stderr)


def sample_generator(values: np.ndarray, shots: int, seed: int, tag: int = TAG_S) -> np.ndarray:
    """Replace every ``g(m)``, including ``g(0)``, by a Hadamard-test estimate."""
    return np.array(
        [hadamard_test(v, shots, seed, (tag, m)).value for m, v in enumerate(values)],
        dtype=complex,
    )


def sampled_overlap_generator(prop, psi0: np.ndarray, n_t: int, shots: int, seed: int) -> OverlapGenerator:
    exact = measure_overlap_generator(prop, psi0, n_t)
    return OverlapGenerator(
        sample_generator(exact.values, shots, seed), exact.evaluation_count, exact.dt
    )


def hadamard_circuit_probabilities(u: np.ndarray, psi: np.ndarray) -> tuple[float, float]:
    """Ancilla ``P(0)`` for the real and imaginary Hadamard tests, from the
    full ancilla-plus-system statevector of ``H - ctrl-U - [S^dag] - H``.

    The ancilla is the most significant qubit. ``<X> = 2 P(0) - 1`` gives
    ``Re <psi|U|psi>``, and with the ``S^dag`` gate ``Im <psi|U|psi>``.
    """
    dim = psi.shape[0]
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    ctrl_u = np.block([[np.eye(dim), np.zeros((dim, dim))], [np.zeros((dim, dim)), u]])
    eye = np.eye(dim)
    start = np.kron(np.array([1, 0], dtype=complex), psi)
    out = []
    for phase_gate in (np.eye(2), np.diag([1, -1j])):
        state = np.kron(h, eye) @ start
        state = ctrl_u @ state
        state = np.kron(h @ phase_gate, eye) @ state
        out.append(float(np.sum(np.abs(state[:dim]) ** 2)))
    return out[0], out[1]
