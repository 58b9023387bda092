"""Real-time propagation of state vectors.

Three single-step propagators share one interface (:class:`Propagator`):

``exact_eigen``
    phases applied in the eigenbasis of a :class:`~vqpe.hamiltonian.Spectrum`;
``lanczos``
    short-iterative Lanczos with adaptive sub-stepping, needing only ``matvec``;
``trotter1``
    first-order product of analytic Pauli-string exponentials, in the term
    order of the :class:`~vqpe.hamiltonian.PauliSumHamiltonian`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalFailureError
from .hamiltonian import Hamiltonian, PauliSumHamiltonian, Spectrum

EXACT_KINDS = ("exact_eigen", "lanczos")


def evolve_exact(spectrum: Spectrum, psi: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t) psi`` through the eigenbasis."""
    if psi.shape[0] != spectrum.dimension:
        raise InvalidArgumentError("state and spectrum dimensions differ")
    c = spectrum.to_eigenbasis(psi)
    return spectrum.from_eigenbasis(np.exp(-1j * spectrum.energies * t) * c)


_ROUNDOFF = 64 * np.finfo(float).eps


def _lanczos_basis(h: Hamiltonian, v0: np.ndarray, k: int):
    """Orthonormal Krylov basis with full reorthogonalization.

    Returns ``(V, alpha, beta, breakdown)`` where ``beta[-1]`` is the
    coupling to the first vector outside the basis.
    """
    dim = v0.shape[0]
    k = min(k, dim)
    V = np.zeros((dim, k), dtype=complex)
    alpha = np.zeros(k)
    beta = np.zeros(k)
    V[:, 0] = v0 / np.linalg.norm(v0)
    for j in range(k):
        w = h.matvec(V[:, j])
        alpha[j] = np.vdot(V[:, j], w).real
        w = w - V[:, : j + 1] @ (V[:, : j + 1].conj().T @ w)
        w = w - V[:, : j + 1] @ (V[:, : j + 1].conj().T @ w)
        beta[j] = np.linalg.norm(w)
        if beta[j] < 1e-13 * max(1.0, abs(alpha[j])):
            return V[:, : j + 1], alpha[: j + 1], beta[: j + 1], True
        if j + 1 < k:
            V[:, j + 1] = w / beta[j]
    return V, alpha, beta, False


def evolve_lanczos(
    h: Hamiltonian,
    psi: np.ndarray,
    t: float,
    krylov_dim: int = 30,
    tol: float = 1e-12,
    max_substeps: int = 100_000,
) -> np.ndarray:
    """``exp(-i H t) psi`` by short-iterative Lanczos.

    The sub-step ``tau`` is accepted when the a-posteriori estimate
    ``beta_k |[exp(-i T tau) e_1]_k|`` stays below ``tol * tau / |t|`` (or a
    round-off floor of a few ulps); it is
    halved on rejection and grown by 1.5x after each acceptance.
    """
    if krylov_dim < 2:
        raise InvalidArgumentError("krylov_dim must be at least 2")
    if t == 0:
        return psi.astype(complex, copy=True)
    norm0 = np.linalg.norm(psi)
    sign = np.sign(t)
    total = abs(t)
    done = 0.0
    tau = total
    out = psi.astype(complex, copy=True)
    steps = 0
    while done < total * (1 - 1e-15):
        tau = min(tau, total - done)
        V, alpha, beta, breakdown = _lanczos_basis(h, out, krylov_dim)
        tri = np.diag(alpha) + np.diag(beta[:-1], 1) + np.diag(beta[:-1], -1)
        evals, evecs = np.linalg.eigh(tri)
        while True:
            steps += 1
            if steps > max_substeps:
                raise NumericalFailureError(
                    f"Lanczos propagation did not converge within {max_substeps} sub-steps"
                )
            c = evecs @ (np.exp(-1j * sign * evals * tau) * evecs[0].conj())
            err = 0.0 if breakdown else beta[-1] * abs(c[-1])
            # the estimate itself bottoms out at round-off
            if err <= max(tol * tau / total, _ROUNDOFF):
                break
            tau *= 0.5
        out = norm0 * (V @ c)
        done += tau
        tau *= 1.5
    return out


def _pauli_exponential(coeff: float, action, psi: np.ndarray, dt: float) -> np.ndarray:
    # exp(-i a P dt) = cos(a dt) I - i sin(a dt) P  for P^2 = I
    perm, phase = action
    theta = coeff * dt
    return np.cos(theta) * psi - 1j * np.sin(theta) * (phase * psi)[perm]


def trotter1_step(h: PauliSumHamiltonian, psi: np.ndarray, dt: float) -> np.ndarray:
    """One first-order Trotter step; the first term of ``h`` acts first."""
    if not np.isfinite(dt):
        raise InvalidArgumentError("dt must be finite")
    out = psi.astype(complex, copy=True)
    for (coeff, _), action in zip(h.terms, h.term_actions):
        out = _pauli_exponential(coeff, action, out, dt)
    return out


@dataclass(frozen=True)
class Propagator:
    """Single-step unitary ``U_a(dt)`` used to build expansion states."""

    kind: str
    hamiltonian: Hamiltonian | None
    dt: float
    spectrum: Spectrum | None = None
    krylov_dim: int = 30
    tol: float = 1e-12

    def __post_init__(self):
        if self.kind not in ("exact_eigen", "lanczos", "trotter1"):
            raise InvalidArgumentError(f"unknown propagator kind {self.kind!r}")
        if self.kind == "exact_eigen" and self.spectrum is None:
            raise InvalidArgumentError("exact_eigen propagation needs a spectrum")
        if self.kind == "trotter1" and not isinstance(self.hamiltonian, PauliSumHamiltonian):
            raise InvalidArgumentError("trotter1 propagation needs a Pauli-sum Hamiltonian")
        if self.kind == "lanczos" and self.hamiltonian is None:
            raise InvalidArgumentError("lanczos propagation needs a Hamiltonian")

    @classmethod
    def exact(cls, spectrum: Spectrum, dt: float, hamiltonian: Hamiltonian | None = None):
        return cls("exact_eigen", hamiltonian, dt, spectrum=spectrum)

    @classmethod
    def lanczos(cls, hamiltonian: Hamiltonian, dt: float, krylov_dim: int = 30, tol: float = 1e-12):
        return cls("lanczos", hamiltonian, dt, krylov_dim=krylov_dim, tol=tol)

    @classmethod
    def trotter(cls, hamiltonian: PauliSumHamiltonian, dt: float):
        return cls("trotter1", hamiltonian, dt)

    @property
    def is_exact(self) -> bool:
        """Whether the step commutes with H (so the H matrix is Toeplitz)."""
        return self.kind in EXACT_KINDS

    @property
    def dimension(self) -> int:
        if self.spectrum is not None:
            return self.spectrum.dimension
        return self.hamiltonian.dimension

    def apply(self, psi: np.ndarray) -> np.ndarray:
        if self.kind == "exact_eigen":
            return evolve_exact(self.spectrum, psi, self.dt)
        if self.kind == "lanczos":
            return evolve_lanczos(self.hamiltonian, psi, self.dt, self.krylov_dim, self.tol)
        return trotter1_step(self.hamiltonian, psi, self.dt)

    def with_dt(self, dt: float) -> Propagator:
        return Propagator(self.kind, self.hamiltonian, dt, self.spectrum, self.krylov_dim, self.tol)


def evolved_sequence(prop: Propagator, psi0: np.ndarray, n_steps: int) -> list[np.ndarray]:
    """``[psi0, U psi0, ..., U^n_steps psi0]``."""
    if n_steps < 0:
        raise InvalidArgumentError("n_steps must be non-negative")
    states = [psi0.astype(complex, copy=True)]
    for _ in range(n_steps):
        states.append(prop.apply(states[-1]))
    return states
